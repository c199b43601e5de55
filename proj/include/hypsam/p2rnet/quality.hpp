#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "hypsam/io/image.hpp"

namespace hypsam::p2r {

// image-text embedding backend for antonym-prompt quality scoring
class QualityScorer {
public:
    virtual ~QualityScorer() = default;
    virtual std::vector<double> embed_image(const Image8& img) = 0;
    virtual std::vector<double> embed_text(const std::string& text) = 0;
};

double cosine(const std::vector<double>& a, const std::vector<double>& b);

// s = e^{s1} / (e^{s1} + e^{s2}) with s_i = cos(f, t_i)
double quality_score(const Image8& img, const std::string& positive, const std::string& negative,
                     QualityScorer& scorer);

struct QualityScores {
    double s_alpha = 0;  // "bright"/"dark" pair
    double s_beta = 0;   // "colorful"/"dull" pair
};

struct SelectorConfig {
    double tau = 0.01;
    double theta = 0.85;
    std::pair<std::string, std::string> pair_alpha{"bright", "dark"};
    std::pair<std::string, std::string> pair_beta{"colorful", "dull"};
    // when set, the tau test applies to the negative-class probability
    // (1 - s_alpha) instead of s_alpha
    bool tau_negative = false;
};

enum class Modality { rgb, thermal };

const char* to_string(Modality m);

// pure case split: RGB iff s_alpha > tau or s_beta > theta
Modality decide(const QualityScores& scores, const SelectorConfig& cfg);

// Scores the RGB image only, then applies decide().
std::pair<Modality, QualityScores> select_modality(const Image8& rgb, const Image8& thermal,
                                                   const SelectorConfig& cfg,
                                                   QualityScorer& scorer);

// Reference scorer grounded in luminance / colorfulness statistics; maps the
// four canonical antonym words onto fixed axes of a small embedding space.
class StatsScorer : public QualityScorer {
public:
    std::vector<double> embed_image(const Image8& img) override;
    std::vector<double> embed_text(const std::string& text) override;
};

// name in {"stats"}; throws ScorerUnavailable otherwise
std::unique_ptr<QualityScorer> make_scorer(const std::string& name);

}  // namespace hypsam::p2r
