// Minimal library use: apply a genotype, then run a short search with the
// toy oracle and print the archive metrics.

#include <iostream>

#include "seqforge/seqforge.hpp"

int main() {
    using namespace seqforge;

    const ReferenceContext small("ACGTACGTAC", {}, {});
    const Genotype g = parse_genotype("SNV(1,A);Ins(4,GG);Del(7,2)");
    std::cout << to_string(g) << "  ->  " << apply(g, small).sequence << '\n';

    std::string ref;
    for (int i = 0; i < 12; ++i) ref += "ACGTTGCAAGTC";
    const ReferenceContext ctx(ref, {40}, {90});

    EvolutionConfig cfg;
    cfg.population_size = 100;
    cfg.archive.capacity = 400;
    cfg.stopping.max_generations = 20;
    cfg.seed = 7;

    ToyOracle oracle;
    const RunResult r = run(ctx, cfg, oracle);
    const ArchiveMetrics m = r.archive.metrics();
    std::cout << "generations " << r.trace.generations.size() << "  size " << m.size << "  quality "
              << m.quality << '\n';
    for (std::size_t b = 0; b < cfg.archive.bin_count; ++b) std::cout << r.archive.count_in_bin(b) << ' ';
    std::cout << '\n';
}
