# %% [markdown]
# Camouflage masks on a small grid
#
# A 6x10 grid, a six-tile request in the middle, and what each masking
# scheme adds as the privacy level grows.

# %%
import numpy as np

from privstream import TileGrid, TileSet, mask_rect_dilation, mask_uniform_random, n_privacy_tiles, sdop_of

grid = TileGrid(6, 10)
request = TileSet.from_indices(grid.M, [24, 25, 26, 34, 35, 36])


def show(tiles, request):
    """Print the grid: '#' requested, '+' camouflage, '.' not sent."""
    for r in range(grid.rows):
        row = ""
        for c in range(grid.cols):
            i = grid.index(r, c)
            row += "#" if i in request else "+" if i in tiles else "."
        print(row)
    print()


# %%
# 24 tiles out of 60 with 6 truly wanted
print("sDoP of 24 tiles:", sdop_of(24, grid.M, len(request)))
show(mask_rect_dilation(grid, request, 24).tiles, request)

# %%
# the same budget, drawn uniformly from the rest of the panorama
show(mask_uniform_random(grid, request, 24, seed=0).tiles, request)

# %%
# growth of the rectangle as rho goes from 0 to 1
for rho in np.linspace(0, 1, 6):
    n_p = n_privacy_tiles(float(rho), grid.M, len(request))
    print(f"rho={rho:.1f}  n_p={n_p}")
    show(mask_rect_dilation(grid, request, n_p).tiles, request)

# %%
# a request that straddles the yaw seam grows across it
seam = TileSet.from_indices(grid.M, [29, 20, 39, 30])
show(mask_rect_dilation(grid, seam, 12).tiles, seam)
