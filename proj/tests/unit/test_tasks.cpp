#include "chuarc/error.hpp"
#include "chuarc/tasks.hpp"

#include <catch_amalgamated.hpp>

#include <cmath>
#include <set>

using namespace chuarc;
using namespace chuarc::tasks;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("teacher functions") {
    // product of (x - r) over the nine roots, written out by hand at x = 0.5
    const double p = 0.5 * (-3.5) * (-2.5) * (-1.5) * (-0.5) * 1.5 * 2.5 * 3.5 * 10.5;
    CHECK_THAT(polynomial_teacher(0.5), WithinRel(p, 1e-15));
    CHECK(polynomial_teacher(0.5) == 452.197265625);
    CHECK_THAT(poly_mod_teacher(0.5), WithinAbs(2.197265625, 1e-12));
    for (double r : {0.0, 1.0, 2.0, 3.0, 4.0, -1.0, -2.0, -3.0, -10.0}) CHECK(polynomial_teacher(r) == 0.0);
    CHECK_THAT(modulo_teacher(2.0, 1.3), WithinAbs(0.7, 1e-12));
    CHECK_THAT(modulo_teacher(-0.5, 1.3), WithinAbs(0.8, 1e-12));
    CHECK(modulo_teacher(1.3, 1.3) == 0.0);
    CHECK_THROWS_AS(modulo_teacher(1.0, 0.0), InputDomainError);
    for (double x = 0.0; x < 20.0; x += 0.37) {
        const double m = modulo_teacher(x * x - 7.0, 1.3);
        CHECK(m >= 0.0);
        CHECK(m < 1.3);
    }

    // sign alternates between consecutive roots
    const std::vector<double> roots = {-10, -3, -2, -1, 0, 1, 2, 3, 4};
    for (std::size_t i = 0; i + 2 < roots.size(); ++i) {
        const double a = polynomial_teacher(0.5 * (roots[i] + roots[i + 1]));
        const double b = polynomial_teacher(0.5 * (roots[i + 1] + roots[i + 2]));
        CHECK(a * b < 0.0);
    }

    const PairTeachers t = pair_teachers(3.0, 5.0);
    CHECK(t.sum == 8.0);
    CHECK(t.product == 15.0);
    CHECK(t.modlin == 1.0);
    CHECK(pair_teachers(0.0, 0.0).modlin == 0.0);
    CHECK(pair_teachers(40.0, 0.0).modlin == 2.0);  // (-40) mod 3
    CHECK_THROWS_AS(pair_teachers(41.0, 1.0), InputDomainError);
}

TEST_CASE("concentric circles") {
    const auto pts = concentric_circles(1000, 4);
    REQUIRE(pts.size() == 1000);
    std::size_t ones = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double r = std::hypot(pts[i].x, pts[i].y);
        CHECK(pts[i].cls == (i % 2 == 0 ? 1 : 0));
        if (pts[i].cls == 1) {
            ++ones;
            CHECK(r <= 1.0);
        } else {
            CHECK(r >= 1.5);
            CHECK(r <= 2.5);
        }
    }
    CHECK(ones == 500);
    const auto again = concentric_circles(1000, 4);
    CHECK(again[17].x == pts[17].x);
}

TEST_CASE("classification helpers") {
    CHECK(classify(0.2) == 0);
    CHECK(classify(1.4) == 0);
    CHECK(classify(1.6) == 1);
    CHECK(classify(1.9) == 1);
    CHECK(classify(7.0) == 1);
    CHECK(class_teacher(0) == 1.0);

    const std::vector<int> truth = {0, 0, 1, 1, 1};
    const std::vector<int> pred = {0, 1, 1, 1, 0};
    const auto m = confusion_matrix(truth, pred, 2);
    CHECK(m[0][0] == 1);
    CHECK(m[0][1] == 1);
    CHECK(m[1][1] == 2);
    CHECK(m[1][0] == 1);
    CHECK(m[0][0] + m[0][1] == 2);  // row sums are class counts
    CHECK(m[1][0] + m[1][1] == 3);
    CHECK_THAT(accuracy(truth, pred), WithinAbs(0.6, 1e-15));

    CHECK(decision_surface(GridSpec{}, [](double, double) { return 0; }).size() == 1600);
    GridSpec g;
    g.nx = 3;
    g.ny = 2;
    const auto surf = decision_surface(g, [](double x, double y) { return x * x + y * y < 1.0 ? 1 : 0; });
    CHECK(surf.size() == 6);
    CHECK(surf[1].x == 0.0);
    CHECK(surf[1].cls == 0);  // (0, -2.5)
}

TEST_CASE("splits") {
    const Split a = split_dataset(2900, 0.2, 1);
    CHECK(a.validation.size() == 580);
    CHECK(a.train.size() == 2320);
    std::set<std::size_t> all(a.train.begin(), a.train.end());
    for (auto i : a.validation) CHECK(all.insert(i).second);
    CHECK(all.size() == 2900);
    CHECK(split_dataset(2000, 0.1, 1).validation.size() == 200);
    CHECK(split_dataset(2900, 0.2, 1).validation == a.validation);
    CHECK_THROWS_AS(split_dataset(1, 0.2, 1), ConfigError);
    CHECK_THROWS_AS(split_dataset(10, 0.0, 1), ConfigError);
}

TEST_CASE("datasets per task") {
    TaskSpec s;
    s.kind = TaskKind::polynomial;
    s.n_cases = 30;
    auto d = make_dataset(s, 1);
    CHECK(d.size() == 30);
    CHECK(d.value_max == 3.0);
    CHECK(d.inputs.front()[0] == 0.1);
    CHECK(d.inputs.back()[0] == 3.0);
    CHECK(d.teachers[3][0] == polynomial_teacher(d.inputs[3][0]));

    s.kind = TaskKind::circles;
    d = make_dataset(s, 1);
    CHECK(d.separate_inputs);
    CHECK(d.n_classes == 2);
    for (std::size_t i = 0; i < d.size(); ++i) {
        CHECK(d.inputs[i][0] >= 0.0);
        CHECK(d.inputs[i][0] <= d.value_max);
        CHECK(d.teachers[i][0] == d.labels[i] + 1.0);
    }

    s.kind = TaskKind::pair_product;
    s.n_cases = 1681;
    d = make_dataset(s, 1);
    CHECK(d.size() == 1681);
    CHECK(d.inputs[1] == std::vector<double>{0.0, 1.0});
    s.n_cases = 100;
    d = make_dataset(s, 1);
    CHECK(d.size() == 100);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.teachers[i][0] == d.inputs[i][0] * d.inputs[i][1]);

    s.kind = TaskKind::lwe_encrypt;
    s.n_cases = 20;
    d = make_dataset(s, 1);
    CHECK(d.inputs.front().size() == 11);
    CHECK(d.n_outputs() == 2);
    CHECK(d.value_max == 6.0);

    s.kind = TaskKind::lwe_decrypt;
    s.decrypt_target = DecryptTarget::bit;
    d = make_dataset(s, 1);
    CHECK(d.inputs.front().size() == 2);
    CHECK(d.n_classes == 2);
    for (std::size_t i = 0; i < d.size(); ++i) CHECK(d.teachers[i][0] == d.labels[i] + 1.0);

    CHECK(parse_task_kind(to_string(TaskKind::poly_mod)) == TaskKind::poly_mod);
    CHECK_THROWS_AS(parse_task_kind("narma"), ConfigError);
}
