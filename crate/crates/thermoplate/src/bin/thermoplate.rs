fn main() {
    std::process::exit(thermoplate::cli::run(std::env::args()));
}
