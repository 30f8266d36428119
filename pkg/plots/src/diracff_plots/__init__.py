from .render import PanelSpec, SchemaError, load_ratio_profile, render_figure

__version__ = "0.1.0"
__all__ = ["PanelSpec", "SchemaError", "load_ratio_profile", "render_figure"]
