fn main() {
    std::process::exit(qmcnet::harness::main_with_args(std::env::args_os()));
}
