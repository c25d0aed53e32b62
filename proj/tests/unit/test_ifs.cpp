#include <doctest.h>

#include <cmath>
#include <random>

#include "../support/oracles.hpp"
#include "mfstl/ifs.hpp"

using namespace mfstl;

namespace {

// Plain FCM from random starts, keeping the lowest objective: a reference for
// the quantile-seeded implementation.
std::vector<double> reference_fcm(const std::vector<double>& x, std::size_t m, std::mt19937_64& rng) {
    std::vector<double> best;
    double best_obj = 1e300;
    std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
    for (int restart = 0; restart < 20; ++restart) {
        std::vector<double> c(m);
        for (auto& v : c) v = x[pick(rng)];
        for (int it = 0; it < 500; ++it) {
            std::vector<double> num(m, 0), den(m, 0);
            for (double xi : x) {
                std::vector<double> d(m);
                for (std::size_t k = 0; k < m; ++k) d[k] = std::max(std::abs(xi - c[k]), 1e-12);
                for (std::size_t k = 0; k < m; ++k) {
                    double s = 0;
                    for (std::size_t j = 0; j < m; ++j) s += (d[k] / d[j]) * (d[k] / d[j]);
                    const double u = 1.0 / s;
                    num[k] += u * u * xi;
                    den[k] += u * u;
                }
            }
            for (std::size_t k = 0; k < m; ++k) c[k] = num[k] / den[k];
        }
        double obj = 0;
        for (double xi : x) {
            double s = 0;
            for (std::size_t k = 0; k < m; ++k) s += 1.0 / std::max((xi - c[k]) * (xi - c[k]), 1e-24);
            obj += 1.0 / s;  // closed-form objective at optimal memberships
        }
        if (obj < best_obj) {
            best_obj = obj;
            best = c;
        }
    }
    std::sort(best.begin(), best.end());
    return best;
}

CharacteristicModel model_with(std::vector<double> centers, double alpha = 0.2, double beta = 0.8) {
    CharacteristicModel m;
    m.centers = std::move(centers);
    m.bounds = partition_domain(m.centers, m.centers, 1.0, 1.0);
    m.alpha = alpha;
    m.beta = beta;
    m.tallies.assign(m.centers.size(), Tally{});
    return m;
}

}  // namespace

TEST_CASE("triple construction") {
    const auto v = IntuitionisticValue::from(0.7, 0.2);
    CHECK(v.pi == doctest::Approx(0.1));
    CHECK(v.valid());
    const auto clamped = IntuitionisticValue::from(0.8, 0.3);
    CHECK(clamped.mu + clamped.gamma <= 1.0);
    CHECK(clamped.valid());
    CHECK(IntuitionisticValue::from(-0.5, 2.0).valid());
}

TEST_CASE("fcm on point masses and preconditions") {
    const std::vector<double> x = {0, 0, 0, 10, 10, 10};
    const auto c = fcm_centers(x, 2);
    CHECK(c[0] == doctest::Approx(0.0).epsilon(1e-6));
    CHECK(c[1] == doctest::Approx(10.0).epsilon(1e-6));
    CHECK_THROWS(fcm_centers(std::vector<double>{4, 4, 4}, 2));
    CHECK_THROWS(fcm_centers(x, 3));
    CHECK_THROWS(fcm_centers(x, 1));
}

TEST_CASE("fcm on a bimodal mixture matches restarts and the true means") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> left(0.0, 1.0), right(10.0, 1.0);
    std::vector<double> x;
    for (int i = 0; i < 300; ++i) x.push_back(i % 2 ? left(rng) : right(rng));
    const auto c = fcm_centers(x, 2);
    const auto ref = reference_fcm(x, 2, rng);
    CHECK(std::abs(c[0] - 0.0) < 0.2);
    CHECK(std::abs(c[1] - 10.0) < 0.2);
    CHECK(c[0] == doctest::Approx(ref[0]).epsilon(1e-3));
    CHECK(c[1] == doctest::Approx(ref[1]).epsilon(1e-3));
}

TEST_CASE("fcm is affine equivariant") {
    std::mt19937_64 rng(23);
    std::exponential_distribution<double> e(1.0);
    std::vector<double> x, y;
    for (int i = 0; i < 80; ++i) {
        x.push_back(e(rng));
        y.push_back(1000.0 + 250.0 * x.back());
    }
    const auto cx = fcm_centers(x, 5);
    const auto cy = fcm_centers(y, 5);
    for (std::size_t k = 0; k < 5; ++k) CHECK(cy[k] == doctest::Approx(1000.0 + 250.0 * cx[k]).epsilon(1e-6));
}

TEST_CASE("domain partition") {
    const std::vector<double> values = {0, 3, 10};
    CHECK(partition_domain(values, std::vector<double>{0, 10}, 1, 1) == std::vector<double>{-1, 5, 11});
    const auto d = partition_domain(values, std::vector<double>{1, 2, 4}, 0, 0);
    CHECK(d[1] == 1.5);
    CHECK(d[2] == 3);
}

TEST_CASE("gaussian membership") {
    const auto m = model_with({0, 10, 30});
    CHECK(m.membership(10, 1) == 1.0);
    CHECK(m.membership(5, 1) == doctest::Approx(0.4));   // (1 - 0.2) / 2 at the shared bound
    CHECK(m.membership(20, 2) == doctest::Approx(0.4));  // spread from the gap below
    CHECK(m.membership(5, 0) == doctest::Approx(0.4));   // first interval uses the gap above
    auto wide = model_with({0, 10}, 0.6);
    CHECK(wide.membership(5, 0) == doctest::Approx(0.2));
}

TEST_CASE("yager non-membership") {
    CHECK(nonmembership(1.0, 0.8) == 0.0);
    CHECK(nonmembership(0.0, 0.8) == 1.0);
    CHECK(nonmembership(0.5, 1.0) == doctest::Approx(0.5));
    CHECK_THROWS(nonmembership(0.5, 0.0));
    CHECK_THROWS(nonmembership(0.5, 1.5));
    for (double beta = 0.05; beta <= 1.0; beta += 0.05)
        for (double mu = 0.0; mu <= 1.0; mu += 0.01) CHECK(mu + nonmembership(mu, beta) <= 1.0 + 1e-15);
}

TEST_CASE("triples per interval") {
    const auto m = model_with({0, 10, 30});
    const auto at_center = ifs_of_value(0, m);
    CHECK(at_center[0] == IntuitionisticValue{1, 0, 0});
    for (const auto& t : ifs_of_value(1e6, m)) {
        CHECK(t.mu < 1e-12);
        CHECK(t.gamma > 1 - 1e-9);
    }
    for (double x = -50; x <= 80; x += 0.37)
        for (const auto& t : ifs_of_value(x, m)) CHECK(t.valid());
}

TEST_CASE("distinction index examples") {
    SUBCASE("perfect separation gives tau 1") {
        const std::vector<Tally> t = {{5, 0}, {0, 7}, {3, 0}, {0, 2}};
        const auto r = distinction_partition(t);
        CHECK(r.tau == 1.0);
        CHECK(r.abnormal_set == std::vector<std::size_t>{0, 2});
        CHECK(r.normal_set == std::vector<std::size_t>{1, 3});
    }
    SUBCASE("evenly mixed gives tau 0") {
        const std::vector<Tally> t = {{3, 3}, {4, 4}, {1, 1}};
        const auto r = distinction_partition(t);
        CHECK(r.eta == doctest::Approx(0.0));
        CHECK(r.tau == doctest::Approx(0.0));
    }
    SUBCASE("three intervals against the exhaustive reference") {
        const std::vector<Tally> t = {{9, 1}, {1, 9}, {5, 5}};
        const auto r = distinction_partition(t);
        const auto ref = oracle::distinction(t);
        CHECK(r.abnormal_set == ref.ac);
        CHECK(r.tau == doctest::Approx(ref.tau));
        CHECK(r.abnormal_set == std::vector<std::size_t>{0});
        CHECK(r.tau == doctest::Approx((0.9 - 0.1 + 0.7 - 0.3) / 2.0));
    }
    SUBCASE("single-class and single-interval data are degenerate") {
        const std::vector<Tally> normal_only = {{0, 4}, {0, 6}};
        CHECK(distinction_partition(normal_only).degenerate);
        CHECK(distinction_partition(normal_only).tau == 0.0);
        const std::vector<Tally> one_hot = {{0, 0}, {6, 2}, {0, 0}};
        const auto r = distinction_partition(one_hot);
        CHECK(r.degenerate);
        CHECK(r.tau == 0.0);
        CHECK(r.abnormal_set == std::vector<std::size_t>{1});
    }
    CHECK_THROWS(distinction_partition(std::vector<Tally>{{1, 1}}));
    CHECK_THROWS(distinction_partition(std::vector<Tally>{{0, 0}, {0, 0}}));
}

TEST_CASE("distinction index matches the exhaustive reference") {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t m = 2 + rng() % 9;
        std::vector<Tally> t(m);
        bool any_a = false, any_n = false;
        for (auto& x : t) {
            x.abnormal = rng() % 3 == 0 ? 0 : rng() % 12;
            x.normal = rng() % 3 == 0 ? 0 : rng() % 12;
            any_a |= x.abnormal > 0;
            any_n |= x.normal > 0;
        }
        if (!any_a) t[0].abnormal = 1;
        if (!any_n) t[m - 1].normal = 1;
        std::size_t populated = 0;
        for (auto& x : t) populated += x.total() > 0;
        if (populated < 2) continue;
        const auto r = distinction_partition(t);
        const auto ref = oracle::distinction(t);
        CHECK(r.abnormal_set == ref.ac);
        CHECK(r.tau == doctest::Approx(ref.tau).epsilon(1e-12));
        CHECK(r.tau >= 0.0);
        CHECK(r.tau <= 1.0);
        CHECK(r.abnormal_set.size() + r.normal_set.size() == m);
    }
}

TEST_CASE("training a characteristic") {
    // Normal samples around 10, abnormal around 50.
    std::vector<double> values;
    std::vector<Label> labels;
    for (int i = 0; i < 30; ++i) {
        values.push_back(10 + (i % 5));
        labels.push_back(Label::Normal);
    }
    for (int i = 0; i < 10; ++i) {
        values.push_back(50 + (i % 3));
        labels.push_back(Label::Abnormal);
    }
    IfsParams params;
    params.intervals = 4;
    const auto m = train_characteristic(values, labels, params);
    REQUIRE(m.interval_count() == 4);
    CHECK_FALSE(m.degenerate);
    CHECK(m.tau == 1.0);
    CHECK(std::is_sorted(m.centers.begin(), m.centers.end()));
    CHECK(m.bounds.size() == 5);
    CHECK(m.bounds.front() == doctest::Approx(10 - 0.05 * 42));
    std::uint64_t total = 0;
    for (const auto& t : m.tallies) total += t.total();
    CHECK(total == values.size());
    for (auto i : m.abnormal_set) CHECK(ifs_ad_classify(m.centers[i], m) == Label::Abnormal);
    for (auto i : m.normal_set) CHECK(ifs_ad_classify(m.centers[i], m) == Label::Normal);
    CHECK(ifs_ad_classify(51, m) == Label::Abnormal);
    CHECK(ifs_ad_classify(12, m) == Label::Normal);
}

TEST_CASE("too few distinct values shrink or degenerate the model") {
    IfsParams params;
    const std::vector<double> two = {1, 1, 1, 5, 5};
    const std::vector<Label> labels = {Label::Normal, Label::Normal, Label::Normal, Label::Abnormal, Label::Abnormal};
    const auto m = train_characteristic(two, labels, params);
    CHECK(m.interval_count() == 2);
    CHECK(m.tau == 1.0);
    const std::vector<double> flat = {3, 3, 3, 3, 3};
    const auto d = train_characteristic(flat, labels, params);
    CHECK(d.degenerate);
    CHECK(d.tau == 0.0);
    CHECK(ifs_ad_classify(3, d) == Label::Normal);
    CHECK(ifs_ad_classify(300, d) == Label::Normal);
}

TEST_CASE("interval lookup and best interval") {
    const auto m = model_with({0, 10, 30});
    CHECK(m.interval_of(-100) == 0);
    CHECK(m.interval_of(5) == 0);  // on a bound: lower interval
    CHECK(m.interval_of(5.0001) == 1);
    CHECK(m.interval_of(1000) == 2);
    CHECK(best_interval(0, m) == 0);
    CHECK(best_interval(29, m) == 2);
    CHECK(best_interval(12, m) == 1);
}
