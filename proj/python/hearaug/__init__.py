"""Two-microphone hearable noise augmentation toolkit."""

from ._core import (  # noqa: F401
    Error,
    FormatError,
    InvalidArgument,
    IoError,
    SchemaError,
    PIPELINE_SAMPLE_RATE,
    __version__,
    add_decorrelation_noise,
    apply_oracle_masks,
    apply_rtf,
    audio_checksum,
    augment_noise,
    combined_l1_loss,
    compute_rtf,
    deconvolve_ir,
    generate_dataset,
    generate_sweep,
    istft,
    load_wav,
    mean_msc,
    mix,
    msc,
    oracle_masks,
    regenerate_dataset,
    save_wav,
    snr_db,
    stft,
    stoi,
    write_fixture_corpus,
)

__all__ = [
    "Error",
    "FormatError",
    "InvalidArgument",
    "IoError",
    "SchemaError",
    "PIPELINE_SAMPLE_RATE",
    "__version__",
    "add_decorrelation_noise",
    "apply_oracle_masks",
    "apply_rtf",
    "audio_checksum",
    "augment_noise",
    "combined_l1_loss",
    "compute_rtf",
    "deconvolve_ir",
    "generate_dataset",
    "generate_sweep",
    "istft",
    "load_wav",
    "mean_msc",
    "mix",
    "msc",
    "oracle_masks",
    "regenerate_dataset",
    "save_wav",
    "snr_db",
    "stft",
    "stoi",
    "write_fixture_corpus",
]
