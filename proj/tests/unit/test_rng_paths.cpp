#include <cmath>
#include <filesystem>
#include <numeric>

#include "doctest.h"
#include "sburgers/paths.hpp"
#include "sburgers/rng.hpp"

using namespace sburgers;

TEST_CASE("philox4x32-10 known-answer vectors (Random123)") {
    CHECK(Philox4x32({0u, 0u})({0u, 0u, 0u, 0u}) ==
          Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
    CHECK(Philox4x32({0xffffffffu, 0xffffffffu})({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}) ==
          Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
    CHECK(Philox4x32({0xa4093822u, 0x299f31d0u})({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}) ==
          Philox4x32::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("counter draws are pure functions of their index") {
    const DrawIndex a{1, 2, 3, 4, 5};
    CHECK(counter_normal(a) == counter_normal(a));
    DrawIndex b = a;
    b.mode = 5;
    CHECK(counter_normal(a) != counter_normal(b));
    b = a;
    b.path = 3;
    CHECK(counter_normal(a) != counter_normal(b));
    const double u = counter_uniform(a);
    CHECK(u > 0.0);
    CHECK(u <= 1.0);
}

TEST_CASE("standard normal moments") {
    const int n = 200000;
    double s = 0, s2 = 0, s4 = 0;
    for (int i = 0; i < n; ++i) {
        const double z = counter_normal({9, 0, 0, 0, static_cast<std::uint64_t>(i)});
        s += z;
        s2 += z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s / n) < 5.0 / std::sqrt(n));
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(s4 / n - 3.0) < 0.1);
}

TEST_CASE("time grid validation") {
    CHECK_THROWS_AS(TimeGrid(0.0, 1.0, 0), std::invalid_argument);
    CHECK_THROWS_AS(TimeGrid(1.0, 1.0, 10), std::invalid_argument);
    const TimeGrid g(0.5, 1.5, 4);
    CHECK(g.dt() == doctest::Approx(0.25));
    CHECK(g.time(4) == doctest::Approx(1.5));
}

TEST_CASE("sampled increments have variance dt and are reproducible") {
    const TimeGrid g(0.0, 1.0, 1000);
    const auto p = sample_path(4, 0, g, 3);
    CHECK(p.modes() == 3);
    CHECK(p.data().size() == 3000);
    double s2 = 0;
    for (double v : p.data()) s2 += v * v;
    CHECK(s2 / 3000.0 == doctest::Approx(g.dt()).epsilon(0.1));
    const auto q = sample_path(4, 0, g, 3);
    CHECK(std::equal(p.data().begin(), p.data().end(), q.data().begin()));
    CHECK(sample_path(4, 1, g, 3).increment(0, 0) != p.increment(0, 0));
    const auto W = p.cumulative(1);
    CHECK(W.front() == 0.0);
    double sum = 0;
    for (std::size_t n = 0; n < p.steps(); ++n) sum += p.increment(n, 1);
    CHECK(W.back() == doctest::Approx(sum));
}

TEST_CASE("increment matrix size mismatch throws") {
    CHECK_THROWS_AS(BrownianPath(TimeGrid(0, 1, 2), 2, {}, std::vector<double>(3)), std::invalid_argument);
}

TEST_CASE("brownian bridge refinement") {
    const TimeGrid g(0.0, 1.0, 50);
    const auto coarse = sample_path(5, 2, g, 2);
    CHECK_THROWS_AS(refine(coarse, 0), std::invalid_argument);
    const auto same = refine(coarse, 1);
    CHECK(std::equal(same.data().begin(), same.data().end(), coarse.data().begin()));

    const auto fine = refine(coarse, 8);
    CHECK(fine.steps() == 400);
    CHECK(fine.lineage().stream != coarse.lineage().stream);
    for (std::size_t n = 0; n < coarse.steps(); ++n) {
        for (std::size_t k = 0; k < 2; ++k) {
            double s = 0;
            for (std::size_t j = 0; j < 8; ++j) s += fine.increment(n * 8 + j, k);
            CHECK(s == doctest::Approx(coarse.increment(n, k)).epsilon(1e-12));
        }
    }
    // fine increments still have variance dt_fine
    double s2 = 0;
    for (double v : fine.data()) s2 += v * v;
    CHECK(s2 / static_cast<double>(fine.data().size()) == doctest::Approx(fine.grid().dt()).epsilon(0.15));
}

TEST_CASE("integrated gbm: alpha 0 is t, left endpoint rule") {
    const auto p = sample_path(1, 0, TimeGrid(0.0, 2.0, 20), 1);
    const auto I0 = integrated_gbm(p, 0, 0.0);
    CHECK(I0.back() == doctest::Approx(2.0));
    const auto I = integrated_gbm(p, 0, 1.5);
    CHECK(I[1] == doctest::Approx(0.1));  // exp(0) * dt
    CHECK(I[2] == doctest::Approx(0.1 + 0.1 * std::exp(-1.5 * p.increment(0, 0))));
    CHECK_THROWS_AS(integrated_gbm(p, 1, 1.0), std::out_of_range);
}

TEST_CASE("first hitting time interpolates") {
    const TimeGrid g(0.0, 3.0, 3);
    const std::vector<double> s = {0.0, 1.0, 3.0, 4.0};
    CHECK(first_hitting_time(g, s, 2.0) == doctest::Approx(1.5));
    CHECK(first_hitting_time(g, s, 0.0) == 0.0);
    CHECK(first_hitting_time(g, s, 5.0) < 0.0);
    CHECK(first_hitting_time(g, std::vector<double>{}, 1.0) < 0.0);
}

TEST_CASE("path dump round trip") {
    const auto p = refine(sample_path(3, 7, TimeGrid(0.25, 1.0, 30), 4), 2);
    const auto file = std::filesystem::temp_directory_path() / "sburgers_path_roundtrip.bin";
    write_path(p, file);
    const auto q = read_path(file);
    CHECK(q.grid() == p.grid());
    CHECK(q.lineage() == p.lineage());
    CHECK(q.modes() == p.modes());
    CHECK(std::equal(p.data().begin(), p.data().end(), q.data().begin()));
    std::filesystem::resize_file(file, 40);
    CHECK_THROWS(read_path(file));
    std::filesystem::remove(file);
}
