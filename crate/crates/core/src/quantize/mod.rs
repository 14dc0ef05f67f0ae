//! Box partitions, quantization operators, exact quantization errors and
//! quantizer construction.

mod grid;
mod lloyd;
mod partition;
mod reduce;

pub use grid::{
    component_lloyd, cube_tail_moment, greedy_allocation, grid_with_counts, optimized_grid,
    per_axis_count, uniform_grid, uniform_spacing_grid, UniformGrid,
};
pub use lloyd::{lloyd_quantizer_1d, Lloyd1d, DEFAULT_MAX_ITER, DEFAULT_TOL};
pub use partition::{dist, dist_pow, BoxPartition, Cell, Quantization, QuantizationOperator};
pub use reduce::{cluster_cells, kmeans, reduce_discrete, Clustering, RESTARTS};
