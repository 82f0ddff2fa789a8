fn main() {
    std::process::exit(cstlab::run());
}
