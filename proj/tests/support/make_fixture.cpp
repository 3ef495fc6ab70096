// Writes a synthetic SQuAD-format corpus to stdout.
// Usage: make_fixture <n_passages> <seed> [prefix]

#include "synthetic_corpus.hpp"

#include <cstdlib>
#include <iostream>

int main(int argc, char** argv)
{
    if (argc < 3) {
        std::cerr << "usage: make_fixture <n_passages> <seed> [prefix]\n";
        return 1;
    }
    odqa::testing::SyntheticOptions options;
    options.n_passages = std::strtoull(argv[1], nullptr, 10);
    options.seed = std::strtoull(argv[2], nullptr, 10);
    if (argc > 3) {
        options.prefix = argv[3];
    }
    std::cout << odqa::testing::make_synthetic_corpus(options).squad_json;
    return 0;
}
