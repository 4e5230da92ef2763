#include "fixture_records.hpp"

#include "foldlab/analysis.hpp"
#include "foldlab/error.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

using namespace foldlab;

namespace {

ErrorCode code_of(const std::function<void()>& f)
{
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return ErrorCode::BadRequest;
}

std::vector<TrialRecord> design(int subjects, const std::function<double(int, Interface, Preview)>& value)
{
    std::vector<TrialRecord> out;
    for (int s = 0; s < subjects; ++s)
        for (Interface i : {Interface::GUI, Interface::AR})
            for (Preview p : {Preview::Off, Preview::On})
                out.push_back({"s" + std::to_string(s), i, p, "m", value(s, i, p)});
    return out;
}

void check_effect(const EffectResult& got, const anova_fixtures::Effect& want)
{
    CHECK(oracle::relative_error(got.F, want.F) <= 1e-6);
    CHECK(oracle::relative_error(got.p, want.p) <= 1e-6);
    CHECK(got.df_num == static_cast<int>(want.df_num));
    CHECK(got.df_den == static_cast<int>(want.df_den));
}

void check_same(const AnovaResult& a, const AnovaResult& b, double tol)
{
    for (auto [x, y] : {std::pair{a.interface, b.interface}, std::pair{a.preview, b.preview},
                        std::pair{a.interaction, b.interaction}}) {
        CHECK(oracle::relative_error(x.F, y.F) <= tol);
        CHECK(oracle::relative_error(x.p, y.p) <= tol);
    }
}

} // namespace

TEST_SUITE("analysis")
{
    TEST_CASE("summaries")
    {
        const auto constant = design(3, [](int, Interface, Preview) { return 5.0; });
        for (const auto& s : summarize(constant, Factor::Interface)) {
            CHECK(s.mean == 5.0);
            CHECK(s.sd == 0.0);
            CHECK(s.count == 6);
        }

        std::vector<TrialRecord> two{{"a", Interface::GUI, Preview::On, "m", 73.0},
                                     {"b", Interface::GUI, Preview::On, "m", 75.0}};
        const auto s = summarize(two, Factor::Preview);
        REQUIRE(s.size() == 1);
        CHECK(s[0].level == "on");
        CHECK(s[0].mean == 74.0);
        CHECK(s[0].sd == doctest::Approx(std::sqrt(2.0)));

        const auto cond = summarize(design(2, [](int, Interface i, Preview p) {
                                        return (i == Interface::AR ? 10.0 : 0.0) + (p == Preview::On ? 1.0 : 0.0);
                                    }),
                                    Factor::Condition);
        REQUIRE(cond.size() == 4);
        CHECK(cond[0].level == "GUI/off");
        CHECK(cond[3].level == "AR/on");
        CHECK(cond[3].mean == 11.0);

        CHECK(code_of([] { summarize({}, Factor::Interface); }) == ErrorCode::Empty);
    }

    TEST_CASE("table display form")
    {
        CHECK(format_mean_sd(73.8, 8.7) == "73.8 (σ=8.7)");
        CHECK(format_mean_sd(4.41, 1.9, 2) == "4.41 (σ=1.90)");
        CHECK(format_mean_sd(240.0, 61.24) == "240.0 (σ=61.2)");
    }

    TEST_CASE("matches the reference implementation on seeded datasets")
    {
        for (const auto& d : anova_fixtures::kDatasets) {
            CAPTURE(d.seed);
            const AnovaResult r = rm_anova_2x2(oracle::fixture_records(d));
            CHECK(r.n_subjects == 18);
            check_effect(r.interface, d.a);
            check_effect(r.preview, d.b);
            check_effect(r.interaction, d.ab);
        }
    }

    TEST_CASE("all-equal data gives F = 0 and p = 1")
    {
        const AnovaResult r = rm_anova_2x2(design(6, [](int, Interface, Preview) { return 3.5; }));
        for (const auto& e : {r.interface, r.preview, r.interaction}) {
            CHECK(e.F == 0.0);
            CHECK(e.p == 1.0);
        }
    }

    TEST_CASE("a pure preview effect with subject offsets")
    {
        const AnovaResult r = rm_anova_2x2(design(10, [](int s, Interface, Preview p) {
            return (p == Preview::On ? 1.0 : 0.0) + 0.37 * s;
        }));
        CHECK(r.preview.p < 1e-6);
        CHECK(r.interface.F == 0.0);
        CHECK(r.interaction.F == 0.0);
        CHECK(r.preview.df_den == 9);

        // A noisy but real effect: finite F and a small p.
        std::mt19937_64 rng(4);
        std::normal_distribution<double> noise(0.0, 0.2);
        const AnovaResult n = rm_anova_2x2(design(10, [&](int s, Interface, Preview p) {
            return (p == Preview::On ? 1.0 : 0.0) + 0.37 * s + noise(rng);
        }));
        CHECK(std::isfinite(n.preview.F));
        CHECK(n.preview.p < 1e-4);
        CHECK(n.interface.p > 1e-3);
    }

    TEST_CASE("F tail probability")
    {
        CHECK(f_survival(anova_fixtures::kTableF, 1, 17) == doctest::Approx(0.05).epsilon(0.04));
        CHECK(std::abs(f_survival(anova_fixtures::kTableF, 1, 17) - 0.05) <= 0.002);
        CHECK(oracle::relative_error(f_survival(anova_fixtures::kTableF, 1, 17), anova_fixtures::kTableP) <= 1e-9);
        CHECK(f_survival(0.0, 1, 17) == 1.0);
        // F(1, d) is the square of a t(d) variable: P(F > t^2) = two-sided t tail.
        CHECK(f_survival(2.1098 * 2.1098, 1, 17) == doctest::Approx(0.05).epsilon(1e-3));
    }

    TEST_CASE("invariances")
    {
        const auto base = oracle::fixture_records(anova_fixtures::kDatasets[2]);
        const AnovaResult r = rm_anova_2x2(base);

        auto shifted = base;
        for (auto& t : shifted)
            t.value += 1000.0;
        check_same(rm_anova_2x2(shifted), r, 1e-6);

        auto scaled = base;
        for (auto& t : scaled)
            t.value *= 3.25;
        check_same(rm_anova_2x2(scaled), r, 1e-9);

        auto relabelled = base;
        for (auto& t : relabelled)
            t.subject = "x" + t.subject + "z";
        std::reverse(relabelled.begin(), relabelled.end());
        std::mt19937_64 rng(12);
        std::shuffle(relabelled.begin(), relabelled.end(), rng);
        check_same(rm_anova_2x2(relabelled), r, 1e-12);
    }

    TEST_CASE("design errors")
    {
        CHECK(code_of([] { rm_anova_2x2({}); }) == ErrorCode::Empty);
        auto missing = design(4, [](int s, Interface, Preview) { return s * 1.0; });
        missing.pop_back();
        CHECK(code_of([&] { rm_anova_2x2(missing); }) == ErrorCode::IncompleteDesign);
        auto duplicate = design(4, [](int s, Interface, Preview) { return s * 1.0; });
        duplicate.push_back(duplicate.front());
        CHECK(code_of([&] { rm_anova_2x2(duplicate); }) == ErrorCode::IncompleteDesign);
        auto mixed = design(4, [](int s, Interface, Preview) { return s * 1.0; });
        mixed[0].measure = "other";
        CHECK(code_of([&] { rm_anova_2x2(mixed); }) == ErrorCode::IncompleteDesign);
        CHECK(code_of([] { rm_anova_2x2(design(1, [](int, Interface, Preview) { return 1.0; })); })
              == ErrorCode::TooFewSubjects);
    }

    TEST_CASE("CSV input")
    {
        std::istringstream ok("Subject,Interface,Preview,Measure,Value\n"
                              "p1,GUI,off,time,240\n"
                              "p1,AR,on,time,1.5e2\n");
        const auto rows = read_trials_csv(ok);
        REQUIRE(rows.size() == 2);
        CHECK(rows[1].interface == Interface::AR);
        CHECK(rows[1].preview == Preview::On);
        CHECK(rows[1].value == 150.0);

        const auto bad = [](const std::string& text) {
            return code_of([&] {
                std::istringstream in(text);
                read_trials_csv(in);
            });
        };
        CHECK(bad("") == ErrorCode::SchemaError);
        CHECK(bad("subject,interface,preview,value\n") == ErrorCode::SchemaError);
        CHECK(bad("subject,interface,preview,measure,value\np1,VR,off,t,1\n") == ErrorCode::SchemaError);
        CHECK(bad("subject,interface,preview,measure,value\np1,GUI,maybe,t,1\n") == ErrorCode::SchemaError);
        CHECK(bad("subject,interface,preview,measure,value\np1,GUI,on,t,abc\n") == ErrorCode::SchemaError);
        CHECK(bad("subject,interface,preview,measure,value\np1,GUI,on,t\n") == ErrorCode::SchemaError);
    }

    TEST_CASE("report lists every measure with its ANOVA rows")
    {
        auto records = oracle::fixture_records(anova_fixtures::kDatasets[0], "iou");
        const auto time = oracle::fixture_records(anova_fixtures::kDatasets[1], "time");
        records.insert(records.end(), time.begin(), time.end());
        const std::string report = analysis_report(records);
        CHECK(report.find("iou") != std::string::npos);
        CHECK(report.find("time") != std::string::npos);
        CHECK(report.find("iou") < report.find("time"));
        CHECK(report.find("F(1,17)") != std::string::npos);
    }
}
