"""Chua-circuit reservoir computing: circuit simulation, reservoir pipeline,
linear readout and LWE benchmark tasks."""

from ._chuarc import (
    ConfigError,
    DimensionError,
    Error,
    GenerationError,
    InputDomainError,
    IntegrationError,
    ParseError,
    canonical_config,
    config_digest,
    diode_current,
    integrate,
    lwe_decrypt,
    lwe_encrypt,
    lwe_generate,
    make_dataset,
    modulo_teacher,
    nmse_case,
    normalize,
    polynomial_teacher,
    predict,
    run_case,
    run_experiment,
    train_readout,
)

__version__ = "0.1.0"
