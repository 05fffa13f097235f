from app.foundation.perf_model.postal import (
    WORD_BYTES,
    ceil_log2,
    interp_flops,
    t_agglomerate,
    t_cgsolve,
    t_exchange,
    t_gather,
    t_interp,
    t_residual,
    t_restrict,
    t_smooth,
)
from app.foundation.perf_model.traffic import (
    carried_values,
    exchange_traffic,
    gather_traffic,
    scatter_traffic,
)

__all__ = [
    "WORD_BYTES",
    "carried_values",
    "ceil_log2",
    "exchange_traffic",
    "gather_traffic",
    "interp_flops",
    "scatter_traffic",
    "t_agglomerate",
    "t_cgsolve",
    "t_exchange",
    "t_gather",
    "t_interp",
    "t_residual",
    "t_restrict",
    "t_smooth",
]
