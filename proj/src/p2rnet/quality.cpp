#include "hypsam/p2rnet/quality.hpp"

#include <algorithm>
#include <cmath>

#include "hypsam/core/errors.hpp"

namespace hypsam::p2r {

double cosine(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty()) throw ShapeMismatch("cosine: embedding sizes differ");
    double dot = 0, na = 0, nb = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0 || nb == 0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double quality_score(const Image8& img, const std::string& positive, const std::string& negative,
                     QualityScorer& scorer) {
    std::vector<double> f = scorer.embed_image(img);
    double s1 = cosine(f, scorer.embed_text(positive));
    double s2 = cosine(f, scorer.embed_text(negative));
    double e1 = std::exp(s1), e2 = std::exp(s2);
    return e1 / (e1 + e2);
}

const char* to_string(Modality m) { return m == Modality::rgb ? "rgb" : "thermal"; }

Modality decide(const QualityScores& scores, const SelectorConfig& cfg) {
    double alpha_stat = cfg.tau_negative ? 1.0 - scores.s_alpha : scores.s_alpha;
    bool pick_rgb = alpha_stat > cfg.tau || scores.s_beta > cfg.theta;
    return pick_rgb ? Modality::rgb : Modality::thermal;
}

std::pair<Modality, QualityScores> select_modality(const Image8& rgb, const Image8& thermal,
                                                   const SelectorConfig& cfg,
                                                   QualityScorer& scorer) {
    (void)thermal;  // the decision is made from RGB scene properties alone
    QualityScores qs;
    qs.s_alpha = quality_score(rgb, cfg.pair_alpha.first, cfg.pair_alpha.second, scorer);
    qs.s_beta = quality_score(rgb, cfg.pair_beta.first, cfg.pair_beta.second, scorer);
    return {decide(qs, cfg), qs};
}

namespace {

// Hasler-Suesstrunk colorfulness, squashed into [0,1]
double colorfulness(const Image8& img) {
    double sum_rg = 0, sum_rg2 = 0, sum_yb = 0, sum_yb2 = 0;
    int64_t n = static_cast<int64_t>(img.h) * img.w;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x) {
            double r = img.at(y, x, 0), g = img.at(y, x, 1), b = img.at(y, x, 2);
            double rg = r - g;
            double yb = 0.5 * (r + g) - b;
            sum_rg += rg;
            sum_rg2 += rg * rg;
            sum_yb += yb;
            sum_yb2 += yb * yb;
        }
    double mu_rg = sum_rg / n, mu_yb = sum_yb / n;
    double var_rg = std::max(0.0, sum_rg2 / n - mu_rg * mu_rg);
    double var_yb = std::max(0.0, sum_yb2 / n - mu_yb * mu_yb);
    double c = std::sqrt(var_rg + var_yb) + 0.3 * std::sqrt(mu_rg * mu_rg + mu_yb * mu_yb);
    return std::min(1.0, c / 100.0);
}

double luminance(const Image8& img) {
    double acc = 0;
    for (int y = 0; y < img.h; ++y)
        for (int x = 0; x < img.w; ++x)
            acc += 0.299 * img.at(y, x, 0) + 0.587 * img.at(y, x, 1) + 0.114 * img.at(y, x, 2);
    return acc / (255.0 * img.h * img.w);
}

}  // namespace

std::vector<double> StatsScorer::embed_image(const Image8& img) {
    if (img.empty()) throw ShapeMismatch("embed_image: empty image");
    double b = luminance(img);
    double c = colorfulness(img);
    return {b, 1.0 - b, c, 1.0 - c};
}

std::vector<double> StatsScorer::embed_text(const std::string& text) {
    std::string t = text;
    std::transform(t.begin(), t.end(), t.begin(), ::tolower);
    if (t == "bright") return {1, 0, 0, 0};
    if (t == "dark") return {0, 1, 0, 0};
    if (t == "colorful") return {0, 0, 1, 0};
    if (t == "dull") return {0, 0, 0, 1};
    throw ScorerUnavailable("stats scorer has no embedding for prompt '" + text + "'");
}

std::unique_ptr<QualityScorer> make_scorer(const std::string& name) {
    if (name == "stats") return std::make_unique<StatsScorer>();
    throw ScorerUnavailable("unknown scorer backend '" + name + "'");
}

}  // namespace hypsam::p2r
