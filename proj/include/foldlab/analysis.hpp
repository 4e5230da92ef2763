#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace foldlab {

enum class Interface { GUI, AR };
enum class Preview { Off, On };

std::string_view interface_name(Interface i);
std::string_view preview_name(Preview p);

struct TrialRecord {
    std::string subject;
    Interface interface = Interface::GUI;
    Preview preview = Preview::Off;
    std::string measure;
    double value = 0.0;
};

enum class Factor { Interface, Preview, Condition };

struct LevelSummary {
    std::string level; // "GUI", "on", or "GUI/on" for Factor::Condition
    double mean = 0.0;
    double sd = 0.0;   // sample standard deviation; 0 for a single value
    std::size_t count = 0;
};

/// Mean and sample σ per level, in fixed level order (GUI before AR, off
/// before on). Throws Empty.
std::vector<LevelSummary> summarize(const std::vector<TrialRecord>& records, Factor group_by);

/// Table display form, e.g. "73.8 (σ=8.7)".
std::string format_mean_sd(double mean, double sd, int decimals = 1);

struct EffectResult {
    double F = 0.0;
    int df_num = 1;
    int df_den = 0;
    double p = 1.0;
};

struct AnovaResult {
    EffectResult interface;   // factor A
    EffectResult preview;     // factor B
    EffectResult interaction; // A×B
    int n_subjects = 0;
};

/// Upper tail P(X > F) of the F(d1, d2) distribution.
double f_survival(double F, double d1, double d2);

/// Two-way repeated-measures ANOVA for a balanced 2×2 within-subject design
/// over the records of a single measure. Throws Empty, IncompleteDesign,
/// TooFewSubjects.
AnovaResult rm_anova_2x2(const std::vector<TrialRecord>& records);

/// Reads `subject,interface,preview,measure,value` CSV. Throws SchemaError.
std::vector<TrialRecord> read_trials_csv(std::istream& in);

/// Per-measure means/σ table and ANOVA rows, measures in first-seen order.
std::string analysis_report(const std::vector<TrialRecord>& records);

} // namespace foldlab
