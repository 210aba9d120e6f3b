fn main() {
    std::process::exit(tsd_bench::cli::run(std::env::args_os()));
}
