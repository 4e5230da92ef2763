#include "foldlab/analysis.hpp"

#include "foldlab/error.hpp"

#include <boost/math/special_functions/beta.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace foldlab {
namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::string lower(std::string s)
{
    std::ranges::transform(s, s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string level_of(const TrialRecord& r, Factor f)
{
    switch (f) {
    case Factor::Interface: return std::string(interface_name(r.interface));
    case Factor::Preview: return std::string(preview_name(r.preview));
    case Factor::Condition:
        return std::string(interface_name(r.interface)) + "/" + std::string(preview_name(r.preview));
    }
    return {};
}

std::vector<std::string> levels(Factor f)
{
    switch (f) {
    case Factor::Interface: return {"GUI", "AR"};
    case Factor::Preview: return {"off", "on"};
    case Factor::Condition: return {"GUI/off", "GUI/on", "AR/off", "AR/on"};
    }
    return {};
}

// One 1-df within-subject effect from per-subject contrast scores d_s:
// SS_effect = n·mean(d)², SS_error = Σ(d_s − mean)², df = (1, n−1).
EffectResult effect_from_contrasts(const std::vector<double>& d, double zero_tolerance)
{
    const auto n = static_cast<double>(d.size());
    double mean = 0.0;
    for (double v : d)
        mean += v;
    mean /= n;
    double ss_error = 0.0;
    for (double v : d)
        ss_error += (v - mean) * (v - mean);
    const double ss_effect = n * mean * mean;

    EffectResult r;
    r.df_num = 1;
    r.df_den = static_cast<int>(d.size()) - 1;
    if (ss_effect <= zero_tolerance) {
        r.F = 0.0;
        r.p = 1.0;
    } else if (ss_error <= zero_tolerance) {
        r.F = std::numeric_limits<double>::infinity();
        r.p = 0.0;
    } else {
        r.F = ss_effect / (ss_error / r.df_den);
        r.p = f_survival(r.F, r.df_num, r.df_den);
    }
    return r;
}

std::string fixed(double v, int decimals)
{
    if (std::isinf(v))
        return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string general(double v)
{
    if (std::isinf(v))
        return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

} // namespace

std::string_view interface_name(Interface i)
{
    return i == Interface::GUI ? "GUI" : "AR";
}

std::string_view preview_name(Preview p)
{
    return p == Preview::Off ? "off" : "on";
}

std::vector<LevelSummary> summarize(const std::vector<TrialRecord>& records, Factor group_by)
{
    if (records.empty())
        throw Error(ErrorCode::Empty, "no records to summarize");
    std::vector<LevelSummary> out;
    for (const auto& level : levels(group_by)) {
        std::vector<double> values;
        for (const auto& r : records)
            if (level_of(r, group_by) == level)
                values.push_back(r.value);
        if (values.empty())
            continue;
        LevelSummary s;
        s.level = level;
        s.count = values.size();
        for (double v : values)
            s.mean += v;
        s.mean /= static_cast<double>(values.size());
        if (values.size() > 1) {
            double ss = 0.0;
            for (double v : values)
                ss += (v - s.mean) * (v - s.mean);
            s.sd = std::sqrt(ss / static_cast<double>(values.size() - 1));
        }
        out.push_back(std::move(s));
    }
    return out;
}

std::string format_mean_sd(double mean, double sd, int decimals)
{
    return fixed(mean, decimals) + " (σ=" + fixed(sd, decimals) + ")";
}

double f_survival(double F, double d1, double d2)
{
    if (std::isnan(F))
        return 1.0;
    if (F <= 0.0)
        return 1.0;
    if (std::isinf(F))
        return 0.0;
    // P(X > F) = I_{d2/(d2 + d1 F)}(d2/2, d1/2)
    return boost::math::ibeta(d2 / 2.0, d1 / 2.0, d2 / (d2 + d1 * F));
}

AnovaResult rm_anova_2x2(const std::vector<TrialRecord>& records)
{
    if (records.empty())
        throw Error(ErrorCode::Empty, "no records to analyze");
    for (const auto& r : records)
        if (r.measure != records.front().measure)
            throw Error(ErrorCode::IncompleteDesign, "records mix measures '" + records.front().measure + "' and '" +
                                                         r.measure + "'");

    // cells[subject][interface][preview]
    std::map<std::string, std::array<std::array<std::optional<double>, 2>, 2>> cells;
    for (const auto& r : records) {
        auto& cell = cells[r.subject][static_cast<int>(r.interface)][static_cast<int>(r.preview)];
        if (cell)
            throw Error(ErrorCode::IncompleteDesign, "subject '" + r.subject + "' has a duplicate " +
                                                         level_of(r, Factor::Condition) + " record");
        cell = r.value;
    }
    for (const auto& [subject, c] : cells)
        for (const auto& row : c)
            for (const auto& v : row)
                if (!v)
                    throw Error(ErrorCode::IncompleteDesign, "subject '" + subject + "' lacks a condition");
    if (cells.size() < 2)
        throw Error(ErrorCode::TooFewSubjects, "repeated-measures ANOVA needs at least 2 subjects");

    double grand = 0.0;
    for (const auto& r : records)
        grand += r.value;
    grand /= static_cast<double>(records.size());
    double ss_total = 0.0;
    for (const auto& r : records)
        ss_total += (r.value - grand) * (r.value - grand);
    // Sums of squares below this are rounding noise relative to the data.
    const double zero_tolerance = ss_total * 1e-12;

    std::vector<double> da, db, dab;
    for (const auto& [subject, c] : cells) {
        const double y00 = *c[0][0], y01 = *c[0][1], y10 = *c[1][0], y11 = *c[1][1];
        da.push_back(((y10 + y11) - (y00 + y01)) / 2.0);
        db.push_back(((y01 + y11) - (y00 + y10)) / 2.0);
        dab.push_back(((y11 - y10) - (y01 - y00)) / 2.0);
    }

    AnovaResult result;
    result.n_subjects = static_cast<int>(cells.size());
    result.interface = effect_from_contrasts(da, zero_tolerance);
    result.preview = effect_from_contrasts(db, zero_tolerance);
    result.interaction = effect_from_contrasts(dab, zero_tolerance);
    return result;
}

std::vector<TrialRecord> read_trials_csv(std::istream& in)
{
    std::string line;
    int line_no = 0;
    auto fail = [&](const std::string& what) {
        throw Error(ErrorCode::SchemaError, "line " + std::to_string(line_no) + ": " + what);
    };

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++line_no;
        if (!trim(line).empty())
            break;
    }
    {
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            header.push_back(lower(trim(field)));
    }
    if (header != std::vector<std::string>{"subject", "interface", "preview", "measure", "value"})
        fail("expected header 'subject,interface,preview,measure,value'");

    std::vector<TrialRecord> records;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ','))
            fields.push_back(trim(field));
        if (!line.empty() && trim(line).back() == ',')
            fields.emplace_back();
        if (fields.size() != 5)
            fail("expected 5 fields, got " + std::to_string(fields.size()));

        TrialRecord r;
        r.subject = fields[0];
        if (r.subject.empty())
            fail("empty subject");
        const std::string iface = lower(fields[1]);
        if (iface == "gui")
            r.interface = Interface::GUI;
        else if (iface == "ar")
            r.interface = Interface::AR;
        else
            fail("interface must be GUI or AR, got '" + fields[1] + "'");
        const std::string preview = lower(fields[2]);
        if (preview == "off")
            r.preview = Preview::Off;
        else if (preview == "on")
            r.preview = Preview::On;
        else
            fail("preview must be off or on, got '" + fields[2] + "'");
        r.measure = fields[3];
        if (r.measure.empty())
            fail("empty measure");
        const auto& v = fields[4];
        const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), r.value);
        if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(r.value))
            fail("value is not a finite number: '" + v + "'");
        records.push_back(std::move(r));
    }
    return records;
}

std::string analysis_report(const std::vector<TrialRecord>& records)
{
    if (records.empty())
        throw Error(ErrorCode::Empty, "no records to analyze");
    std::vector<std::string> measures;
    for (const auto& r : records)
        if (std::ranges::find(measures, r.measure) == measures.end())
            measures.push_back(r.measure);

    std::ostringstream out;
    for (const auto& m : measures) {
        std::vector<TrialRecord> subset;
        for (const auto& r : records)
            if (r.measure == m)
                subset.push_back(r);
        const AnovaResult anova = rm_anova_2x2(subset);

        out << "measure " << m << " (n=" << anova.n_subjects << ")\n";
        for (Factor f : {Factor::Condition, Factor::Interface, Factor::Preview})
            for (const auto& s : summarize(subset, f)) {
                char label[32];
                std::snprintf(label, sizeof label, "  %-10s", s.level.c_str());
                out << label << format_mean_sd(s.mean, s.sd, 2) << '\n';
            }
        auto row = [&](const char* name, const EffectResult& e) {
            char buf[128];
            std::snprintf(buf, sizeof buf, "  %-20s F(%d,%d) = %-10s p = %s\n", name, e.df_num, e.df_den,
                          general(e.F).c_str(), general(e.p).c_str());
            out << buf;
        };
        row("interface", anova.interface);
        row("preview", anova.preview);
        row("interface x preview", anova.interaction);
        out << '\n';
    }
    return out.str();
}

} // namespace foldlab
