#include <doctest.h>

#include <cmath>
#include <sstream>

#include "random_lp.hpp"
#include "reserveflow/errors.hpp"
#include "reserveflow/lp.hpp"

using namespace reserveflow;

TEST_CASE("one variable with a lower bound") {
    LpProblem p;
    p.add_variable("x", 1.0, 3.0, kInf);
    for (auto s : {solve(p), vertex_oracle(p)}) {
        REQUIRE(s.status == LpStatus::Optimal);
        CHECK(s.x[0] == doctest::Approx(3.0).epsilon(1e-10));
        CHECK(s.lower_duals[0] == doctest::Approx(1.0).epsilon(1e-10));
    }
}

TEST_CASE("box with a shared budget row") {
    LpProblem p;
    p.add_variable("x", -1.0, 0.0, 1.0);
    p.add_variable("y", -1.0, 0.0, 1.0);
    p.add_ub("budget", {0, 1}, {1.0, 1.0}, 1.0);
    auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(s.ub_duals[0] == doctest::Approx(1.0).epsilon(1e-9));
    // centered point of the optimal face
    CHECK(s.x[0] == doctest::Approx(0.5).epsilon(1e-6));
    CHECK(check_kkt(p, s).worst() < 1e-8);
    auto v = vertex_oracle(p);
    CHECK(v.objective == doctest::Approx(-1.0).epsilon(1e-10));
    CHECK(v.ub_duals[0] == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("infeasible and unbounded verdicts") {
    LpProblem inf;
    inf.add_variable("x", 0.0, -kInf, kInf);
    inf.add_ub("le0", {0}, {1.0}, 0.0);
    inf.add_ub("ge1", {0}, {-1.0}, -1.0);
    auto s = solve(inf);
    CHECK(s.status == LpStatus::Infeasible);
    CHECK(vertex_oracle(inf).status == LpStatus::Infeasible);
    // Farkas: G'z - zl + zu = 0 and h'z - lo'zl + hi'zu < 0
    const auto& c = s.certificate;
    REQUIRE(c.ub.size() == 2);
    CHECK(std::abs(c.ub[0] - c.ub[1]) < 1e-6);
    CHECK(0.0 * c.ub[0] - 1.0 * c.ub[1] < 0);

    LpProblem unb;
    unb.add_variable("x", -1.0, 0.0, kInf);
    auto u = solve(unb);
    CHECK(u.status == LpStatus::Unbounded);
    REQUIRE(u.certificate.ray.size() == 1);
    CHECK(u.certificate.ray[0] > 0);
    CHECK(vertex_oracle(unb).status == LpStatus::Unbounded);
}

TEST_CASE("presolve keeps duals of singleton rows and fixed columns") {
    LpProblem p;
    int x = p.add_variable("x", 2.0, -kInf, kInf);
    int y = p.add_variable("y", 1.0, 4.0, 4.0);
    p.add_ub("x_ge", {x}, {-1.0}, -1.0);     // x >= 1
    p.add_ub("sum", {x, y}, {-1.0, -1.0}, -7.0);  // x + y >= 7, so x >= 3
    auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[x] == doctest::Approx(3.0));
    CHECK(s.ub_duals[1] == doctest::Approx(2.0));
    CHECK(s.ub_duals[0] == doctest::Approx(0.0));
    CHECK(check_kkt(p, s).worst() < 1e-9);
}

TEST_CASE("equality rows and free variables") {
    LpProblem p;
    int a = p.add_variable("a", 1.0, -kInf, kInf);
    int b = p.add_variable("b", 3.0, 0.0, 10.0);
    p.add_eq("bal", {a, b}, {1.0, 1.0}, 5.0);
    p.add_ub("acap", {a}, {1.0}, 2.0);
    auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x[a] == doctest::Approx(2.0));
    CHECK(s.x[b] == doctest::Approx(3.0));
    // c_b + y = 0 with b interior
    CHECK(s.eq_duals[0] == doctest::Approx(-3.0));
    CHECK(s.ub_duals[1 - 1] == doctest::Approx(2.0));
    CHECK(check_kkt(p, s).worst() < 1e-9);
}

TEST_CASE("kkt checker flags perturbations") {
    LpProblem p;
    int x = p.add_variable("x", -1.0, 0.0, 10.0);
    int y = p.add_variable("y", 0.0, 0.0, 10.0);
    p.add_ub("link", {x, y}, {1.0, -1.0}, 0.0);
    p.add_ub("ycap", {y}, {1.0}, 4.0);
    auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(check_kkt(p, s).worst() < 1e-8);

    auto bumped = s;
    bumped.x[x] += 1e-3;  // link binds with rhs 0
    CHECK(check_kkt(p, bumped).primal == doctest::Approx(1e-3).epsilon(1e-6));

    auto flipped = s;
    flipped.ub_duals[0] = -flipped.ub_duals[0];
    CHECK(check_kkt(p, flipped).dual > 0.5);
}

TEST_CASE("random LPs against vertex enumeration") {
    std::mt19937_64 rng(20240611);
    int optimal = 0;
    for (int t = 0; t < 50; ++t) {
        auto p = testutil::random_lp(rng, 0.2);
        auto o = vertex_oracle(p);
        auto s = solve(p);
        INFO("trial " << t);
        REQUIRE(s.status == o.status);
        if (o.status != LpStatus::Optimal) continue;
        ++optimal;
        CHECK(std::abs(s.objective - o.objective) <= 1e-8 * (1.0 + std::abs(o.objective)));
        auto k = check_kkt(p, s);
        CHECK(k.worst() < 1e-8);
        CHECK(check_kkt(p, o).worst() < 1e-8);
    }
    CHECK(optimal > 20);
}

TEST_CASE("determinism and serial/parallel agreement") {
    std::mt19937_64 rng(7);
    auto p = testutil::random_lp(rng);
    SolverOptions a, b;
    a.execution = Execution::serial;
    b.execution = Execution::parallel;
    auto s1 = solve(p, a), s2 = solve(p, b), s3 = solve(p, b);
    CHECK(s1.x == s2.x);
    CHECK(s2.ub_duals == s3.ub_duals);
}

TEST_CASE("oracle refuses large problems") {
    LpProblem p;
    for (int j = 0; j < 40; ++j) p.add_variable("x" + std::to_string(j), 1.0, 0.0, 1.0);
    CHECK_THROWS_AS(vertex_oracle(p, 1000), TooLarge);
}

TEST_CASE("lp text dump") {
    LpProblem p;
    p.add_variable("g[1]", 8.0, 0.0, 16.0);
    p.add_variable("r", 2.0, 0.0, kInf);
    p.add_eq("bal", {0}, {1.0}, 6.0);
    p.add_ub("cap", {0, 1}, {1.0, 1.0}, 16.0);
    std::ostringstream os;
    write_lp_text(p, os);
    auto t = os.str();
    CHECK(t.find("Minimize") == 0);
    CHECK(t.find("bal: 1 g_1_ = 6") != std::string::npos);
    CHECK(t.find("cap: 1 g_1_ + 1 r <= 16") != std::string::npos);
    CHECK(t.find("0 <= r <= +inf") != std::string::npos);
}

TEST_CASE("lp text dump keeps names distinct") {
    LpProblem p;
    p.add_variable("x y", 1.0, 0.0, 1.0);
    p.add_variable("x_y", 1.0, 0.0, 1.0);
    p.add_ub("flow+.L1", {0}, {1.0}, 1.0);
    p.add_ub("flow-.L1", {0}, {-1.0}, -0.0);
    std::ostringstream os;
    write_lp_text(p, os);
    auto t = os.str();
    CHECK(t.find("flow_fwd.L1:") != std::string::npos);
    CHECK(t.find("flow_rev.L1: - 1 x_y <= 0\n") != std::string::npos);
    CHECK(t.find("1 x_y + 1 x_y_2") != std::string::npos);
}
