#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "sgeom/partitions.hpp"

using namespace sgeom;

namespace {

// Bell numbers by the triangle recursion.
std::vector<long> bell_numbers(int upto) {
    std::vector<std::vector<long>> tri = {{1}};
    for (int r = 1; r <= upto; ++r) {
        std::vector<long> row = {tri.back().back()};
        for (long x : tri.back()) row.push_back(row.back() + x);
        tri.push_back(std::move(row));
    }
    std::vector<long> bell;
    for (const auto& row : tri) bell.push_back(row.front());
    return bell;
}

IndexSet iota_set(int n) {
    IndexSet s;
    for (int i = 1; i <= n; ++i) s.push_back(i);
    return s;
}

} // namespace

TEST_CASE("enumeration matches Bell numbers") {
    auto bell = bell_numbers(8);
    for (int n = 0; n <= 7; ++n) {
        auto parts = enumerate_partitions(iota_set(n));
        CHECK(static_cast<long>(parts.size()) == bell[static_cast<std::size_t>(n)]);
        // duplicate-free
        auto copy = parts;
        std::sort(copy.begin(), copy.end());
        CHECK(std::adjacent_find(copy.begin(), copy.end()) == copy.end());
    }
    CHECK(enumerate_partitions({1}).size() == 1);
    CHECK(enumerate_partitions({1})[0].blocks() == std::vector<IndexSet>{{1}});
    CHECK(enumerate_partitions(iota_set(3)).size() == 5);
}

TEST_CASE("even-block filter against exhaustive filtering oracle") {
    auto all = enumerate_partitions(iota_set(4));
    std::vector<Partition> manual;
    for (const auto& p : all)
        if (p.all_blocks_even()) manual.push_back(p);
    auto filtered = enumerate_partitions(iota_set(4), PartitionFilter::even_blocks);
    CHECK(filtered.size() == 4);
    auto a = manual, b = filtered;
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    CHECK(a == b);
    std::vector<std::vector<IndexSet>> expect = {
        {{1, 2, 3, 4}}, {{1, 2}, {3, 4}}, {{1, 3}, {2, 4}}, {{1, 4}, {2, 3}}};
    for (const auto& e : expect) {
        Partition p(e);
        CHECK(std::find(filtered.begin(), filtered.end(), p) != filtered.end());
    }
}

TEST_CASE("length filter") {
    auto by_len = enumerate_partitions(iota_set(4), PartitionFilter::all, 2);
    CHECK(by_len.size() == 7); // Stirling S(4,2)
    for (const auto& p : by_len) CHECK(p.length() == 2);
}

TEST_CASE("partition sign") {
    CHECK(partition_sign(Partition({{2}, {1, 3}})) == -1); // worked example
    CHECK(partition_sign(Partition({{1}, {2}, {3}})) == 1);
    CHECK(partition_sign(Partition({{1, 4}, {2, 3}})) == 1); // (1,4,2,3) has two inversions
}

TEST_CASE("sign agrees between lex and graded lex block order") {
    std::mt19937_64 rng(5);
    for (const auto& p : enumerate_partitions(iota_set(6))) {
        Partition lex(p.blocks(), BlockOrder::lex);
        CHECK(partition_sign(p) == partition_sign(lex));
    }
}

TEST_CASE("sign invariant under exchanging adjacent even blocks") {
    // direct check on even partitions: permuting blocks leaves the sign alone
    for (const auto& p : enumerate_partitions(iota_set(6), PartitionFilter::even_blocks)) {
        auto blocks = p.blocks();
        std::vector<IndexSet> swapped(blocks);
        if (swapped.size() >= 2) {
            std::swap(swapped[0], swapped[1]);
            // bypass canonical sorting: compute the sign of the raw arrangement
            IndexSet cat1, cat2;
            for (const auto& b : blocks) cat1.insert(cat1.end(), b.begin(), b.end());
            for (const auto& b : swapped) cat2.insert(cat2.end(), b.begin(), b.end());
            auto inversions = [](const IndexSet& v) {
                int k = 0;
                for (std::size_t i = 0; i < v.size(); ++i)
                    for (std::size_t j = i + 1; j < v.size(); ++j)
                        if (v[i] > v[j]) ++k;
                return k % 2;
            };
            CHECK(inversions(cat1) == inversions(cat2));
        }
    }
}

TEST_CASE("graded lexicographic subset order") {
    CHECK(graded_lex_compare({1, 2}, {3}) < 0); // even before odd
    CHECK(graded_lex_compare({1}, {2}) < 0);
    std::vector<IndexSet> subsets = {{}, {1}, {2}, {3}, {1, 2}, {1, 3}, {2, 3}, {1, 2, 3}};
    std::sort(subsets.begin(), subsets.end(),
              [](const IndexSet& a, const IndexSet& b) { return graded_lex_compare(a, b) < 0; });
    std::vector<IndexSet> expect = {{}, {1, 2}, {1, 3}, {2, 3}, {1}, {2}, {3}, {1, 2, 3}};
    CHECK(subsets == expect);
}

TEST_CASE("blocks are stored evens first") {
    Partition p({{5}, {1, 2}, {3}, {4, 6}});
    CHECK(p.blocks() == std::vector<IndexSet>{{1, 2}, {4, 6}, {3}, {5}});
    CHECK(p.even_count() == 2);
    CHECK(p.odd_count() == 2);
}

TEST_CASE("refinement and induced partitions") {
    Partition omega({{1, 2}, {3}});
    Partition nu({{1}, {2}, {3}});
    auto res = refinement(omega, nu);
    REQUIRE(res.is_coarser);
    // omega's first stored block is {1,2}
    CHECK(res.induced[0].blocks() == std::vector<IndexSet>{{1}, {2}});
    CHECK(res.induced[1].blocks() == std::vector<IndexSet>{{3}});

    CHECK(refinement(Partition({{1, 3}, {2}}), nu).is_coarser);
    CHECK_FALSE(refinement(nu, Partition({{1, 3}, {2}})).is_coarser);
    CHECK_THROWS_AS(refinement(Partition({{1, 2}}), Partition({{1, 3}})), dimension_error);
}

TEST_CASE("coarser partitions via the Part(nu) bijection") {
    Partition nu({{1}, {2}, {3}});
    auto coarser = coarser_of(nu);
    CHECK(coarser.size() == 5); // Bell(3)
    for (const auto& w : coarser) CHECK(refinement(w, nu).is_coarser);
    // and conversely every coarser partition shows up
    for (const auto& w : enumerate_partitions(iota_set(3)))
        CHECK(std::find(coarser.begin(), coarser.end(), w) != coarser.end());
}

TEST_CASE("sign multiplicativity over even refinements") {
    // for nu all-even and omega <= nu all-even:
    // sgn(nu) = sgn(omega) * prod_j sgn(omega_j | nu)
    for (int n = 2; n <= 6; n += 2) {
        for (const auto& nu : enumerate_partitions(iota_set(n), PartitionFilter::even_blocks)) {
            for (const auto& omega : coarser_of(nu)) {
                if (!omega.all_blocks_even()) continue;
                auto res = refinement(omega, nu);
                REQUIRE(res.is_coarser);
                int rhs = partition_sign(omega);
                for (const auto& ind : res.induced) rhs *= partition_sign(ind);
                CHECK(partition_sign(nu) == rhs);
            }
        }
    }
}

TEST_CASE("empty set convention") {
    auto parts = enumerate_partitions({});
    REQUIRE(parts.size() == 1);
    CHECK(parts[0].length() == 0);
}
