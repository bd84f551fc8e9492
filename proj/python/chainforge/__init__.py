"""Food supply chain design, optimization and validation."""

from ._core import (
    ChainforgeError,
    ConfigError,
    Design,
    DomainError,
    InfeasibleBounds,
    InfeasibleConfig,
    InfeasiblePeriod,
    Instance,
    LinkageError,
    NumericalError,
    ParseError,
    ValidationError,
    __version__,
    affordability,
    estimate,
    extract_front,
    load_design,
    load_instance,
    make_design,
    parse_grid,
    parse_instance,
    run_gfa,
    run_pipeline,
    validate,
    weiszfeld,
)

__all__ = [name for name in dir() if not name.startswith("_")]
