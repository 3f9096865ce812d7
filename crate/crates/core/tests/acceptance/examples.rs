//! Every shipped example runs to completion.

macro_rules! example {
    ($module:ident, $file:literal) => {
        #[path = $file]
        mod $module;

        #[test]
        fn $module() {
            $module::run_example().expect(concat!($file, " should run"));
        }
    };
}

example!(quickstart, "../../examples/quickstart.rs");
example!(channel_statistics, "../../examples/channel_statistics.rs");
example!(outage_rate, "../../examples/outage_rate.rs");
example!(gradient_check, "../../examples/gradient_check.rs");
example!(optimize_layout, "../../examples/optimize_layout.rs");
example!(monte_carlo_validation, "../../examples/monte_carlo_validation.rs");
example!(benchmark_schemes, "../../examples/benchmark_schemes.rs");
example!(parameter_sweep, "../../examples/parameter_sweep.rs");
example!(config_file, "../../examples/config_file.rs");
