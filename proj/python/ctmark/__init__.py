"""Contourlet-domain blind image watermarking with a 2D-GARCH detector."""

from ._ctmark import (  # noqa: F401
    apply_attack,
    contourlet_analyze,
    contourlet_synthesize,
    detect,
    embed,
    garch_fit,
    garch_simulate,
    load_pgm,
    psnr,
    run_experiment,
    save_pgm,
)

__all__ = [
    "apply_attack",
    "contourlet_analyze",
    "contourlet_synthesize",
    "detect",
    "embed",
    "garch_fit",
    "garch_simulate",
    "load_pgm",
    "psnr",
    "run_experiment",
    "save_pgm",
]
