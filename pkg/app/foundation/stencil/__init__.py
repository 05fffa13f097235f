from app.foundation.stencil.galerkin import galerkin, interp_to_csr, stencil_to_csr
from app.foundation.stencil.interpolation import build_interp
from app.foundation.stencil.kernels import (
    apply_stencil,
    check_center,
    color_map,
    interp_correct_patch,
    pad,
    pad_weights,
    relax_color,
    residual_patch,
    restrict_patch,
)

__all__ = [
    "apply_stencil",
    "build_interp",
    "check_center",
    "color_map",
    "galerkin",
    "interp_correct_patch",
    "interp_to_csr",
    "pad",
    "pad_weights",
    "relax_color",
    "residual_patch",
    "restrict_patch",
    "stencil_to_csr",
]
