from app.foundation.grid.layout import LevelLayout, build_layouts, has_interior_gap
from app.foundation.grid.partition import (
    agglomerate_blocks,
    agglomerate_extent,
    block_members,
    build_grid_sequence,
    coarsen_dims,
    coarsen_extent,
    coarsen_grid,
    is_coarsest,
    max_local_dims,
    nests,
    partition,
    split_1d,
    tile_bounds,
    tiled_local_dims,
    tiling_survives,
)

__all__ = [
    "LevelLayout",
    "agglomerate_blocks",
    "agglomerate_extent",
    "block_members",
    "build_grid_sequence",
    "build_layouts",
    "coarsen_dims",
    "coarsen_extent",
    "coarsen_grid",
    "has_interior_gap",
    "is_coarsest",
    "max_local_dims",
    "nests",
    "partition",
    "split_1d",
    "tile_bounds",
    "tiled_local_dims",
    "tiling_survives",
]
