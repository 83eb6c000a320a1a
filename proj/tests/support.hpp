#ifndef CIRCNET_TESTS_SUPPORT_HPP
#define CIRCNET_TESTS_SUPPORT_HPP

#include "circnet/reconstruct.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace circnet::testing {

std::string fixture(const std::string& name);

Rational q(const char* text);

// Reference network with known conductances on terminals 1..n; interior ids follow.
struct GeneratedNetwork {
    Network net;
    StrandMatching matching; // only meaningful for minimal networks
};

// A random perfect matching on 2n stubs realised with straight chords, then
// given random conductances. Straight chords meet at most once, so the result
// is lens-free and therefore critical. Empty when the matching pins two
// terminals to one face, disconnects the graph, or exceeds max_interior.
std::optional<GeneratedNetwork> random_minimal_network(std::size_t n, std::size_t max_interior, std::uint64_t seed);

// Cactus network: cycles and pendant edges glued at single nodes, every edge
// on at most one cycle. Conductances from {1,2,3} to make equal split
// weights likely.
Network random_one_nested(std::size_t max_terminals, std::uint64_t seed);

// Copy of `net` with every unknown conductance replaced by a random rational.
Network with_random_conductances(const Network& net, std::uint64_t seed);

// Circular pairs of size <= max_k with positive minor (exact or thresholded).
template <Scalar T>
std::set<CircularPair> positive_pairs(const Matrix<T>& m, std::size_t max_k, const Tolerance& tol = {});

std::set<CircularPair> connection_set(const Network& net, std::size_t max_k);

// Complete graph on terminals 1..4 with edge resistances
// r12=p, r23=q, r34=z, r14=x, r13=r, r24=y.
Network k4_network(const Rational& p, const Rational& q, const Rational& r, const Rational& x, const Rational& y,
                   const Rational& z);

// Split system with arcs A,B,C,D in circular order carrying the two equal
// crossing splits (weight a) and two equal flanking splits (weight b != a),
// plus every trivial split.
struct PatternSystem {
    WeightedSplitSystem<Rational> system;
    std::vector<int> a, b, c, d;
    Rational weight_a, weight_b;
};
PatternSystem sym_pattern_system(std::uint64_t seed);

// Checks a witness against its own claims: the arcs are consecutive blocks
// covering the order, each named split has the stated bipartition and weight,
// the crossing pair crosses and a != b.
bool witness_consistent(const WeightedSplitSystem<Rational>& s, const ObstructionWitness<Rational>& w);

} // namespace circnet::testing

#endif
