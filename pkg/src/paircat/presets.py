"""Named experiment presets shipped as frozen config files."""

from importlib import resources

from .runner import ExperimentConfig, load_config

PRESET_NAMES = (
    "fig1a", "fig1b", "fig1c",
    "fig2a", "fig2b", "fig2c",
    "fig3a", "fig3b", "fig3c",
    "fig4-text", "fig4-caption",
    "fig5a", "fig5b",
    "fig6a", "fig6b",
    "fig7",
)

QUAD_PRESETS = tuple(n for n in PRESET_NAMES if n.startswith(("fig1", "fig2", "fig3")))
EVOLVE_PRESETS = tuple(n for n in PRESET_NAMES if n not in QUAD_PRESETS)


def preset_text(name: str) -> str:
    """Exact contents of the frozen preset file."""
    if name not in PRESET_NAMES:
        raise ValueError(
            f"unknown preset {name!r}; available: {', '.join(PRESET_NAMES)}"
        )
    return (
        resources.files("paircat").joinpath("presets", f"{name}.cfg").read_text()
    )


def load_preset(name: str) -> ExperimentConfig:
    return load_config(preset_text(name))
