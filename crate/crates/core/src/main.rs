fn main() {
    if let Some(threads) = std::env::var("DEGEN_CALC_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if threads > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
        }
    }
    std::process::exit(degen_calc::cli::main_with_args(std::env::args_os()));
}
