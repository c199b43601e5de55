#include "hypsam/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "hypsam/core/errors.hpp"
#include "hypsam/data/dataset.hpp"
#include "hypsam/data/prepare.hpp"

namespace hypsam::metrics {

namespace {

constexpr double kEps = 2.220446049250313e-16;

void check_sizes(const SalMap& pred, const BinMask& gt, const char* op) {
    if (pred.h != gt.h || pred.w != gt.w)
        throw ShapeMismatch(std::string(op) + ": prediction and GT sizes differ");
}

std::vector<double> make_thresholds(int n) {
    std::vector<double> t(n);
    for (int i = 0; i < n; ++i) t[i] = static_cast<double>(i) / n;
    return t;
}

// Per-threshold confusion counts under the strict predicate pred > t_i.
// A pixel with value v passes thresholds 0..k-1 where k = #{t_i < v}, so one
// histogram pass gives every count at once.
struct ThresholdCounts {
    std::vector<int64_t> tp, pp;  // true positives / predicted positives per threshold
    int64_t fg = 0, total = 0;
};

ThresholdCounts threshold_counts(const SalMap& pred, const BinMask& gt, int n) {
    ThresholdCounts tc;
    tc.total = static_cast<int64_t>(pred.h) * pred.w;
    std::vector<double> t = make_thresholds(n);
    std::vector<int64_t> hist_fg(n + 1, 0), hist_all(n + 1, 0);
    for (int64_t i = 0; i < tc.total; ++i) {
        double v = pred.data[static_cast<size_t>(i)];
        int k = static_cast<int>(std::lower_bound(t.begin(), t.end(), v) - t.begin());
        hist_all[k]++;
        if (gt.data[static_cast<size_t>(i)]) {
            hist_fg[k]++;
            tc.fg++;
        }
    }
    tc.tp.assign(n, 0);
    tc.pp.assign(n, 0);
    int64_t cfg = 0, call = 0;
    for (int k = n; k >= 1; --k) {
        cfg += hist_fg[k];
        call += hist_all[k];
        tc.tp[k - 1] = cfg;
        tc.pp[k - 1] = call;
    }
    return tc;
}

double matlab_round(double v) { return std::floor(v + 0.5); }

// fspecial('gaussian', k, sigma)
std::vector<double> matlab_gauss2d(int k, double sigma) {
    std::vector<double> w(static_cast<size_t>(k) * k);
    int h = k / 2;
    double sum = 0;
    for (int y = 0; y < k; ++y)
        for (int x = 0; x < k; ++x) {
            double v = std::exp(-((y - h) * (y - h) + (x - h) * (x - h)) / (2.0 * sigma * sigma));
            w[static_cast<size_t>(y) * k + x] = v;
            sum += v;
        }
    for (double& v : w) v /= sum;
    return w;
}

// zero-padded correlation with a k x k window
std::vector<double> convolve_same(const std::vector<double>& img, int h, int w,
                                  const std::vector<double>& win, int k) {
    std::vector<double> out(static_cast<size_t>(h) * w, 0.0);
    int r = k / 2;
#pragma omp parallel for schedule(static)
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            double acc = 0;
            for (int dy = -r; dy <= r; ++dy) {
                int sy = y + dy;
                if (sy < 0 || sy >= h) continue;
                for (int dx = -r; dx <= r; ++dx) {
                    int sx = x + dx;
                    if (sx < 0 || sx >= w) continue;
                    acc += img[static_cast<size_t>(sy) * w + sx] *
                           win[static_cast<size_t>(dy + r) * k + (dx + r)];
                }
            }
            out[static_cast<size_t>(y) * w + x] = acc;
        }
    return out;
}

// region-aware SSIM block used by the S-measure
double ssim_block(const std::vector<double>& p, const std::vector<double>& g) {
    size_t n = p.size();
    if (n == 0) return 0.0;
    double x = 0, y = 0;
    for (size_t i = 0; i < n; ++i) {
        x += p[i];
        y += g[i];
    }
    x /= static_cast<double>(n);
    y /= static_cast<double>(n);
    double sx = 0, sy = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        sx += (p[i] - x) * (p[i] - x);
        sy += (g[i] - y) * (g[i] - y);
        sxy += (p[i] - x) * (g[i] - y);
    }
    double denom = static_cast<double>(n) - 1 + kEps;
    sx /= denom;
    sy /= denom;
    sxy /= denom;
    double a = 4.0 * x * y * sxy;
    double b = (x * x + y * y) * (sx + sy);
    if (a != 0.0) return a / (b + kEps);
    return (b == 0.0) ? 1.0 : 0.0;
}

double object_score(const std::vector<double>& vals) {
    if (vals.empty()) return 0.0;
    double x = 0;
    for (double v : vals) x += v;
    x /= static_cast<double>(vals.size());
    double var = 0;
    for (double v : vals) var += (v - x) * (v - x);
    double sigma = vals.size() > 1 ? std::sqrt(var / (static_cast<double>(vals.size()) - 1)) : 0.0;
    return 2.0 * x / (x * x + 1.0 + sigma + kEps);
}

}  // namespace

PrCurve pr_curve(const SalMap& pred, const BinMask& gt, int n) {
    check_sizes(pred, gt, "pr_curve");
    ThresholdCounts tc = threshold_counts(pred, gt, n);
    PrCurve pr;
    pr.thresholds = make_thresholds(n);
    pr.precision.resize(n);
    pr.recall.resize(n);
    for (int i = 0; i < n; ++i) {
        int64_t tp = tc.tp[i], pp = tc.pp[i];
        pr.precision[i] = pp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(pp);
        pr.recall[i] = tc.fg == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tc.fg);
    }
    return pr;
}

double f_measure(double precision, double recall, double beta2) {
    double den = beta2 * precision + recall;
    if (den == 0.0) return 0.0;
    return (beta2 + 1.0) * precision * recall / den;
}

FCurveStats f_curve_stats(const PrCurve& pr, double beta2) {
    FCurveStats st;
    st.f_max = 0;
    double sum = 0;
    for (int i = 0; i < pr.size(); ++i) {
        double f = f_measure(pr.precision[i], pr.recall[i], beta2);
        sum += f;
        st.f_max = std::max(st.f_max, f);
    }
    st.f_avg = pr.size() ? sum / pr.size() : 0.0;
    return st;
}

double adaptive_f(const SalMap& pred, const BinMask& gt, double beta2) {
    check_sizes(pred, gt, "adaptive_f");
    int64_t n = static_cast<int64_t>(pred.h) * pred.w;
    double mean = 0;
    for (double v : pred.data) mean += v;
    mean /= static_cast<double>(n);
    double th = std::min(2.0 * mean, 1.0);
    int64_t tp = 0, pp = 0, fg = 0;
    for (int64_t i = 0; i < n; ++i) {
        bool pos = pred.data[static_cast<size_t>(i)] >= th;
        bool g = gt.data[static_cast<size_t>(i)] != 0;
        pp += pos;
        fg += g;
        tp += (pos && g);
    }
    double precision = pp > 0 ? static_cast<double>(tp) / pp : 0.0;
    double recall = fg > 0 ? static_cast<double>(tp) / fg : 0.0;
    return f_measure(precision, recall, beta2);
}

double mae(const SalMap& pred, const BinMask& gt) {
    check_sizes(pred, gt, "mae");
    double acc = 0;
    int64_t n = static_cast<int64_t>(pred.h) * pred.w;
    for (int64_t i = 0; i < n; ++i)
        acc += std::abs(pred.data[static_cast<size_t>(i)] - (gt.data[static_cast<size_t>(i)] ? 1.0 : 0.0));
    return acc / static_cast<double>(n);
}

void edt_nearest(const BinMask& fg, std::vector<double>& dist2, std::vector<int64_t>& nearest) {
    const int h = fg.h, w = fg.w;
    const double INF = 1e30;
    dist2.assign(static_cast<size_t>(h) * w, INF);
    nearest.assign(static_cast<size_t>(h) * w, -1);

    // vertical pass: nearest foreground row within each column
    std::vector<int> vrow(static_cast<size_t>(h) * w, -1);
#pragma omp parallel for schedule(static)
    for (int x = 0; x < w; ++x) {
        int last = -1;
        for (int y = 0; y < h; ++y) {
            if (fg.at(y, x)) last = y;
            vrow[static_cast<size_t>(y) * w + x] = last;
        }
        int next = -1;
        for (int y = h - 1; y >= 0; --y) {
            if (fg.at(y, x)) next = y;
            int cur = vrow[static_cast<size_t>(y) * w + x];
            if (next >= 0 && (cur < 0 || next - y < y - cur))
                vrow[static_cast<size_t>(y) * w + x] = next;
        }
    }

    // horizontal pass: lower envelope of parabolas f(x') = vdist2(x')
    std::vector<int> v(w);
    std::vector<double> z(w + 1);
    std::vector<double> f(w);
#pragma omp parallel for schedule(static) firstprivate(v, z, f)
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int r = vrow[static_cast<size_t>(y) * w + x];
            f[x] = r < 0 ? INF : static_cast<double>(y - r) * (y - r);
        }
        int k = -1;
        for (int q = 0; q < w; ++q) {
            if (f[q] >= INF) continue;
            if (k < 0) {
                k = 0;
                v[0] = q;
                z[0] = -INF;
                z[1] = INF;
                continue;
            }
            double s;
            while (true) {
                int p = v[k];
                s = ((f[q] + static_cast<double>(q) * q) - (f[p] + static_cast<double>(p) * p)) /
                    (2.0 * q - 2.0 * p);
                if (s <= z[k]) {
                    --k;
                    if (k < 0) break;
                } else {
                    break;
                }
            }
            ++k;
            v[k] = q;
            z[k] = k == 0 ? -INF : s;
            z[k + 1] = INF;
        }
        if (k < 0) continue;  // no foreground anywhere in this row's columns
        int j = 0;
        for (int x = 0; x < w; ++x) {
            while (z[j + 1] < x) ++j;
            int q = v[j];
            double d = f[q] + static_cast<double>(x - q) * (x - q);
            dist2[static_cast<size_t>(y) * w + x] = d;
            nearest[static_cast<size_t>(y) * w + x] =
                static_cast<int64_t>(vrow[static_cast<size_t>(y) * w + q]) * w + q;
        }
    }
}

double weighted_f(const SalMap& pred, const BinMask& gt) {
    check_sizes(pred, gt, "weighted_f");
    const int h = gt.h, w = gt.w;
    const int64_t n = static_cast<int64_t>(h) * w;
    int64_t fg = gt.count();
    if (fg == 0) return 0.0;

    std::vector<double> dist2;
    std::vector<int64_t> nearest;
    edt_nearest(gt, dist2, nearest);

    std::vector<double> e(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i)
        e[static_cast<size_t>(i)] =
            std::abs(pred.data[static_cast<size_t>(i)] - (gt.data[static_cast<size_t>(i)] ? 1.0 : 0.0));

    // background pixels inherit the error at their nearest foreground pixel
    std::vector<double> et = e;
    for (int64_t i = 0; i < n; ++i)
        if (!gt.data[static_cast<size_t>(i)]) et[static_cast<size_t>(i)] = e[static_cast<size_t>(nearest[static_cast<size_t>(i)])];

    std::vector<double> ea = convolve_same(et, h, w, matlab_gauss2d(7, 5.0), 7);

    double sum_ew_fg = 0, sum_ew_bg = 0;
    const double lnhalf_over5 = std::log(0.5) / 5.0;
    for (int64_t i = 0; i < n; ++i) {
        size_t s = static_cast<size_t>(i);
        double min_e_ea = (gt.data[s] && ea[s] < e[s]) ? ea[s] : e[s];
        if (gt.data[s]) {
            sum_ew_fg += min_e_ea;  // B = 1 on foreground
        } else {
            double b = 2.0 - std::exp(lnhalf_over5 * std::sqrt(dist2[s]));
            sum_ew_bg += min_e_ea * b;
        }
    }
    double tpw = static_cast<double>(fg) - sum_ew_fg;
    double fpw = sum_ew_bg;
    double recall = 1.0 - sum_ew_fg / static_cast<double>(fg);
    double precision = tpw / (kEps + tpw + fpw);
    return 2.0 * recall * precision / (kEps + recall + precision);
}

EMeasure e_measure(const SalMap& pred, const BinMask& gt, int n) {
    check_sizes(pred, gt, "e_measure");
    ThresholdCounts tc = threshold_counts(pred, gt, n);
    const double N = static_cast<double>(tc.total);
    const double fg = static_cast<double>(tc.fg);
    const double bg = N - fg;

    EMeasure em;
    em.max = 0;
    double sum = 0;
    for (int i = 0; i < n; ++i) {
        double tp = static_cast<double>(tc.tp[i]);
        double pos = static_cast<double>(tc.pp[i]);
        double enhanced_sum;
        if (tc.fg == 0) {
            enhanced_sum = N - pos;  // 1 - FM
        } else if (bg == 0.0) {
            enhanced_sum = pos;  // FM
        } else {
            double fp = pos - tp, fn = fg - tp, tn = bg - fp;
            double p = pos / N, g = fg / N;
            auto enhanced = [&](double a, double b) {
                double align = 2.0 * a * b / (a * a + b * b + kEps);
                return (align + 1.0) * (align + 1.0) / 4.0;
            };
            enhanced_sum = tp * enhanced(1 - g, 1 - p) + fp * enhanced(-g, 1 - p) +
                           fn * enhanced(1 - g, -p) + tn * enhanced(-g, -p);
        }
        // the toolbox N-1 denominator lets a perfect prediction exceed 1 by
        // 1/(N-1); clamp so scores stay in [0,1] at any resolution
        double e = std::min(1.0, enhanced_sum / (N - 1 + kEps));
        sum += e;
        em.max = std::max(em.max, e);
    }
    em.mean = sum / n;
    return em;
}

double s_measure(const SalMap& pred, const BinMask& gt, double alpha) {
    check_sizes(pred, gt, "s_measure");
    const int h = gt.h, w = gt.w;
    const int64_t n = static_cast<int64_t>(h) * w;
    double y = static_cast<double>(gt.count()) / static_cast<double>(n);
    double mean_pred = 0;
    for (double v : pred.data) mean_pred += v;
    mean_pred /= static_cast<double>(n);
    if (y == 0.0) return 1.0 - mean_pred;
    if (y == 1.0) return mean_pred;

    // object-aware term
    std::vector<double> fg_vals, bg_vals;
    fg_vals.reserve(static_cast<size_t>(n));
    bg_vals.reserve(static_cast<size_t>(n));
    for (int64_t i = 0; i < n; ++i) {
        size_t s = static_cast<size_t>(i);
        if (gt.data[s])
            fg_vals.push_back(pred.data[s]);
        else
            bg_vals.push_back(1.0 - pred.data[s]);
    }
    double s_object = y * object_score(fg_vals) + (1.0 - y) * object_score(bg_vals);

    // region-aware term: split at the GT centroid (1-based MATLAB convention)
    double area = static_cast<double>(gt.count());
    double sx = 0, sy = 0;
    for (int yy = 0; yy < h; ++yy)
        for (int xx = 0; xx < w; ++xx)
            if (gt.at(yy, xx)) {
                sy += yy + 1;
                sx += xx + 1;
            }
    int cx = static_cast<int>(matlab_round(sx / area));
    int cy = static_cast<int>(matlab_round(sy / area));

    auto block = [&](int y0, int y1, int x0, int x1, bool from_gt) {
        std::vector<double> vals;
        vals.reserve(static_cast<size_t>(std::max(0, y1 - y0)) * std::max(0, x1 - x0));
        for (int yy = y0; yy < y1; ++yy)
            for (int xx = x0; xx < x1; ++xx)
                vals.push_back(from_gt ? (gt.at(yy, xx) ? 1.0 : 0.0) : pred.at(yy, xx));
        return vals;
    };
    double total = static_cast<double>(n);
    double w1 = (static_cast<double>(cx) * cy) / total;
    double w2 = (static_cast<double>(w - cx) * cy) / total;
    double w3 = (static_cast<double>(cx) * (h - cy)) / total;
    double w4 = 1.0 - w1 - w2 - w3;
    double q1 = ssim_block(block(0, cy, 0, cx, false), block(0, cy, 0, cx, true));
    double q2 = ssim_block(block(0, cy, cx, w, false), block(0, cy, cx, w, true));
    double q3 = ssim_block(block(cy, h, 0, cx, false), block(cy, h, 0, cx, true));
    double q4 = ssim_block(block(cy, h, cx, w, false), block(cy, h, cx, w, true));
    double s_region = w1 * q1 + w2 * q2 + w3 * q3 + w4 * q4;

    double q = alpha * s_object + (1.0 - alpha) * s_region;
    return q < 0 ? 0.0 : q;
}

ImageReport score_pair(const SalMap& pred, const BinMask& gt, int thresholds) {
    SalMap p = data::resize_map_bilinear(pred, gt.h, gt.w);
    for (double& v : p.data) v = v < 0 ? 0 : (v > 1 ? 1 : v);
    ImageReport r;
    r.pr = pr_curve(p, gt, thresholds);
    FCurveStats fc = f_curve_stats(r.pr);
    r.f_avg = fc.f_avg;
    r.f_max = fc.f_max;
    r.f_adp = adaptive_f(p, gt);
    r.f_w = weighted_f(p, gt);
    r.mae = mae(p, gt);
    EMeasure em = e_measure(p, gt, thresholds);
    r.e_m = em.mean;
    r.e_m_max = em.max;
    r.s_m = s_measure(p, gt);
    return r;
}

MetricReport aggregate(const std::vector<ImageReport>& reports,
                       const std::map<std::string, std::vector<std::string>>* attributes) {
    if (reports.empty()) throw EmptyDataset("no image reports to aggregate");
    MetricReport m;
    m.images = static_cast<int>(reports.size());
    int n = reports.front().pr.size();
    m.pr.thresholds = reports.front().pr.thresholds;
    m.pr.precision.assign(n, 0.0);
    m.pr.recall.assign(n, 0.0);
    for (const auto& r : reports) {
        m.f_avg += r.f_avg;
        m.f_max += r.f_max;
        m.f_adp += r.f_adp;
        m.f_w += r.f_w;
        m.mae += r.mae;
        m.e_m += r.e_m;
        m.e_m_max += r.e_m_max;
        m.s_m += r.s_m;
        for (int i = 0; i < n; ++i) {
            m.pr.precision[i] += r.pr.precision[i];
            m.pr.recall[i] += r.pr.recall[i];
        }
    }
    double c = static_cast<double>(m.images);
    m.f_avg /= c;
    m.f_max /= c;
    m.f_adp /= c;
    m.f_w /= c;
    m.mae /= c;
    m.e_m /= c;
    m.e_m_max /= c;
    m.s_m /= c;
    for (int i = 0; i < n; ++i) {
        m.pr.precision[i] /= c;
        m.pr.recall[i] /= c;
    }

    if (attributes) {
        std::map<std::string, std::pair<double, int>> groups;
        for (const auto& r : reports) {
            auto it = attributes->find(r.name);
            if (it == attributes->end()) continue;
            for (const auto& tag : it->second) {
                groups[tag].first += r.f_w;
                groups[tag].second += 1;
            }
        }
        std::set<std::string> emitted;
        for (const auto& tag : data::canonical_attributes()) {
            auto it = groups.find(tag);
            if (it == groups.end()) continue;
            m.attribute_fw.emplace_back(tag, it->second.first / it->second.second);
            emitted.insert(tag);
        }
        for (const auto& [tag, acc] : groups)
            if (!emitted.count(tag)) m.attribute_fw.emplace_back(tag, acc.first / acc.second);
    }
    m.per_image = reports;
    return m;
}

}  // namespace hypsam::metrics
