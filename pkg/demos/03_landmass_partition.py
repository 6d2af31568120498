"""Islands on a map are the modular sets of the average-speed modular.

A traveller moving at average speed v covers geodesic distance d in time
d/v; a point on another island is unreachable at any speed, so the modular
is infinite there and the island becomes its own modular set.

    python3 demos/03_landmass_partition.py
"""

from pathlib import Path

from modmetric import builtin_modular, default_lambda_grid, geodesic, load_landmass_file, partition_star

here = Path(__file__).parent
grid = load_landmass_file(here / "maps" / "archipelago.txt")
w = builtin_modular(grid, "average_speed")

print(f"map {grid.rows}x{grid.cols}, cell size {grid.cell_size}, {grid.size} land cells\n")
classes = partition_star(w, grid, default_lambda_grid())
label = {p: chr(ord("A") + i) for i, c in enumerate(classes) for p in c}
for r in range(grid.rows):
    print("   " + "".join(label.get((r, c), ".") for c in range(grid.cols)))
print(f"\n{len(classes)} modular sets found; each is one island.")

a, b, c = (0, 0), (2, 1), (0, 8)
print(f"\ngeodesic {a} -> {b}: {geodesic(grid, a, b)}")
print(f"w at speed 2: {w(2.0, a, b)}   at speed 0.5: {w(0.5, a, b)}")
print(f"geodesic {a} -> {c}: {geodesic(grid, a, c)}   (different island)")
