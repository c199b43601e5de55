#pragma once

#include <map>
#include <string>
#include <vector>

#include "hypsam/io/image.hpp"

// Saliency evaluation toolbox. Curve metrics use n evenly spaced cut points
// t_i = i/n over [0,1) with strict thresholding (pred > t), so a perfect
// binary prediction scores 1 at every point. All scoring happens at GT
// resolution; predictions are resized beforehand, never the ground truth.
namespace hypsam::metrics {

inline constexpr int kDefaultThresholds = 256;

struct PrCurve {
    std::vector<double> thresholds;
    std::vector<double> precision;
    std::vector<double> recall;

    int size() const { return static_cast<int>(thresholds.size()); }
};

PrCurve pr_curve(const SalMap& pred, const BinMask& gt, int n = kDefaultThresholds);

// F = (b2+1) P R / (b2 P + R); 0 when the denominator vanishes
double f_measure(double precision, double recall, double beta2 = 0.3);

struct FCurveStats {
    double f_avg = 0, f_max = 0;
};
FCurveStats f_curve_stats(const PrCurve& pr, double beta2 = 0.3);

// F at the adaptive threshold min(2*mean(pred), 1)
double adaptive_f(const SalMap& pred, const BinMask& gt, double beta2 = 0.3);

double mae(const SalMap& pred, const BinMask& gt);

// weighted F-measure with dependency-weighted errors (beta = 1)
double weighted_f(const SalMap& pred, const BinMask& gt);

struct EMeasure {
    double mean = 0, max = 0;
};
EMeasure e_measure(const SalMap& pred, const BinMask& gt, int n = kDefaultThresholds);

// alpha * object-aware + (1-alpha) * region-aware structural similarity
double s_measure(const SalMap& pred, const BinMask& gt, double alpha = 0.5);

struct ImageReport {
    std::string name;
    double f_avg = 0, f_max = 0, f_adp = 0, f_w = 0;
    double mae = 0, e_m = 0, e_m_max = 0, s_m = 0;
    PrCurve pr;
};

// resizes pred to GT resolution, then computes every metric
ImageReport score_pair(const SalMap& pred, const BinMask& gt, int thresholds = kDefaultThresholds);

struct MetricReport {
    int images = 0;
    double f_avg = 0, f_max = 0, f_adp = 0, f_w = 0;
    double mae = 0, e_m = 0, e_m_max = 0, s_m = 0;
    PrCurve pr;  // pointwise mean across images
    std::vector<std::pair<std::string, double>> attribute_fw;
    std::vector<ImageReport> per_image;
};

// dataset means of all scalars; PR averaged pointwise; optional per-attribute
// F_w table in the canonical 13-attribute order
MetricReport aggregate(const std::vector<ImageReport>& reports,
                       const std::map<std::string, std::vector<std::string>>* attributes = nullptr);

// exact Euclidean distance transform; for every pixel the squared distance to
// the nearest foreground pixel and that pixel's linear index (row-major).
// Exposed for tests.
void edt_nearest(const BinMask& fg, std::vector<double>& dist2, std::vector<int64_t>& nearest);

}  // namespace hypsam::metrics
