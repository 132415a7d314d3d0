//! Distribution summaries, monthly grouping and rainfall/extent lag
//! correlation, plus SVG rendering of the results.

mod boxplot;
mod correlation;
mod monthly;
mod svg;

pub use boxplot::{box_stats, quantile_sorted, BoxStats};
pub use correlation::{lag_correlation, pearson, LagCorrResult, LagEntry, DEFAULT_MAX_LAG};
pub use monthly::{group_by_month, month_index, monthly_mean_series};
pub use svg::{render_box_svg, render_series_svg};
