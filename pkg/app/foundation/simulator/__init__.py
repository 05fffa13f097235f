from app.foundation.simulator.ranks import LogicalRank, halo_exchange, window

__all__ = ["LogicalRank", "halo_exchange", "window"]
