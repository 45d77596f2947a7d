#include "ewnoise/objective.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "ewnoise/error.hpp"

namespace ewnoise {

const char* term_tag_name(TermTag tag) {
    switch (tag) {
    case TermTag::Azimuth: return "azimuth";
    case TermTag::IntraRange: return "intra_range";
    case TermTag::InterSwath: return "inter_swath";
    case TermTag::Regularizer: return "regularizer";
    }
    return "?";
}

double LinearSystem::evaluate(const Vec5& k) const {
    double total = 0.0;
    for (const LossRow& row : rows) {
        double r = row.residual_const;
        for (int n = 0; n < 5; ++n) r -= row.coefficients[n] * k[n];
        total += r * r;
    }
    return total;
}

std::map<TermTag, double> LinearSystem::evaluate_terms(const Vec5& k) const {
    std::map<TermTag, double> out{{TermTag::Azimuth, 0.0},
                                  {TermTag::IntraRange, 0.0},
                                  {TermTag::InterSwath, 0.0},
                                  {TermTag::Regularizer, 0.0}};
    for (const LossRow& row : rows) {
        double r = row.residual_const;
        for (int n = 0; n < 5; ++n) r -= row.coefficients[n] * k[n];
        out[row.tag] += r * r;
    }
    return out;
}

std::vector<int> ExtremaLayout::SwathExtrema::peaks() const {
    std::vector<int> out;
    for (size_t i = 0; i < sequence.size(); i += 2) out.push_back(sequence[i]);
    return out;
}

std::vector<int> ExtremaLayout::SwathExtrema::troughs() const {
    std::vector<int> out;
    for (size_t i = 1; i < sequence.size(); i += 2) out.push_back(sequence[i]);
    return out;
}

namespace {

double max_field_value(const NoiseField& field) {
    double m = 0.0;
    for (double v : field.values) m = std::max(m, std::abs(v));
    return m;
}

// Gate on the x-difference / y-difference ratio; pairs whose y difference
// carries no scale information are dropped outright.
double gated_weight(double x_diff, double y_diff, double y_scale, double base,
                    const ObjectiveParams& params) {
    if (std::abs(y_diff) < 1e-12 * y_scale) return 0.0;
    double ratio = x_diff / y_diff;
    return (ratio > params.ratio_lo && ratio < params.ratio_hi) ? base : 0.0;
}

// Mean of x and y over the valid cells of rectangle rows x column window
// [col_lo, col_hi]. Returns false when fewer than min_fraction of the
// nominal window is valid.
struct WindowMean {
    double x = 0.0, y = 0.0;
};

bool windowed_mean(const SceneRaster& raster, const NoiseField& field,
                   const SubswathRectangle& rect, int col_lo, int col_hi,
                   double min_fraction, WindowMean& out) {
    const int i0 = std::max(0, rect.first_azimuth_line);
    const int i1 = std::min(field.rows - 1, rect.last_azimuth_line);
    const long nominal =
        static_cast<long>(i1 - i0 + 1) * (col_hi - col_lo + 1);
    const int c0 = std::max({col_lo, 0, rect.first_range_sample});
    const int c1 = std::min({col_hi, field.cols - 1, rect.last_range_sample});
    if (nominal <= 0 || c0 > c1) return false;
    double sum_x = 0.0, sum_y = 0.0;
    long count = 0;
    for (int i = i0; i <= i1; ++i) {
        for (int j = c0; j <= c1; ++j) {
            if (!raster.is_valid(i, j)) continue;
            sum_x += raster.at(i, j);
            sum_y += field.at(i, j);
            ++count;
        }
    }
    if (count < min_fraction * nominal || count == 0) return false;
    out.x = sum_x / count;
    out.y = sum_y / count;
    return true;
}

} // namespace

ExtremaLayout locate_extrema(const NoiseField& field, const CalibrationSet& cal,
                             int epsilon) {
    ExtremaLayout layout;
    layout.epsilon = epsilon;

    for (int a = 0; a < kSwathCount; ++a) {
        if (!field.map.has_swath(a)) continue;

        // Column extent and per-column mean of the noise field.
        int ext_lo = field.cols, ext_hi = -1;
        for (int i = 0; i < field.rows; ++i) {
            for (const SubswathMap::Span& s : field.map.row_spans(i)) {
                if (s.swath != a) continue;
                ext_lo = std::min(ext_lo, s.begin);
                ext_hi = std::max(ext_hi, s.end - 1);
            }
        }
        const int width = ext_hi - ext_lo + 1;
        std::vector<double> sum(width, 0.0);
        std::vector<long> count(width, 0);
        for (int i = 0; i < field.rows; ++i) {
            for (const SubswathMap::Span& s : field.map.row_spans(i)) {
                if (s.swath != a) continue;
                for (int j = s.begin; j < s.end; ++j) {
                    sum[j - ext_lo] += field.at(i, j);
                    ++count[j - ext_lo];
                }
            }
        }
        std::vector<double> profile(width, 0.0);
        for (int j = 0; j < width; ++j)
            profile[j] = count[j] > 0 ? sum[j] / count[j]
                                      : (j > 0 ? profile[j - 1] : 0.0);

        // Centered moving average, window 2*epsilon+1, shrinking at the ends.
        std::vector<double> smooth(width, 0.0);
        for (int j = 0; j < width; ++j) {
            int w0 = std::max(0, j - epsilon);
            int w1 = std::min(width - 1, j + epsilon);
            double s = 0.0;
            for (int w = w0; w <= w1; ++w) s += profile[w];
            smooth[j] = s / (w1 - w0 + 1);
        }

        // Extrema are searched where the +-epsilon window stays inside the
        // subswath span; the clamped span edges remain admissible peaks.
        const int lo = epsilon;
        const int hi = width - 1 - epsilon;
        const char* name = swath_name(swath_at(a));
        if (lo > hi)
            throw Error(ErrorKind::ExtremaNotFound,
                        std::string(name) + ": subswath too narrow for epsilon " +
                            std::to_string(epsilon));

        // Compress equal-value runs; run midpoints represent plateaus.
        std::vector<int> pos;
        std::vector<double> val;
        int run_start = lo;
        for (int j = lo; j <= hi; ++j) {
            if (j == hi || smooth[j + 1] != smooth[j]) {
                pos.push_back((run_start + j) / 2);
                val.push_back(smooth[j]);
                run_start = j + 1;
            }
        }
        if (pos.size() < 2)
            throw Error(ErrorKind::ExtremaNotFound,
                        std::string(name) + ": flat noise profile");

        // Alternating extrema of the compressed series (endpoints included).
        std::vector<int> seq_pos;
        std::vector<bool> seq_peak;
        const size_t m = pos.size();
        for (size_t q = 0; q < m; ++q) {
            bool is_peak, is_extremum;
            if (q == 0) {
                is_peak = val[0] > val[1];
                is_extremum = true;
            } else if (q == m - 1) {
                is_peak = val[m - 1] > val[m - 2];
                is_extremum = true;
            } else {
                is_peak = val[q] > val[q - 1] && val[q] > val[q + 1];
                is_extremum = is_peak || (val[q] < val[q - 1] && val[q] < val[q + 1]);
            }
            if (is_extremum) {
                seq_pos.push_back(pos[q]);
                seq_peak.push_back(is_peak);
            }
        }
        // Keep the sequence bracketed by peaks.
        while (!seq_peak.empty() && !seq_peak.front()) {
            seq_pos.erase(seq_pos.begin());
            seq_peak.erase(seq_peak.begin());
        }
        while (!seq_peak.empty() && !seq_peak.back()) {
            seq_pos.pop_back();
            seq_peak.pop_back();
        }

        const size_t target = (a == 0) ? 5 : 3;
        // Prune lowest-prominence adjacent pairs until the cardinality fits.
        while (seq_pos.size() > target) {
            size_t best = 0;
            double best_prom = std::numeric_limits<double>::infinity();
            for (size_t q = 0; q + 1 < seq_pos.size(); ++q) {
                double prom = std::abs(smooth[seq_pos[q]] - smooth[seq_pos[q + 1]]);
                if (prom < best_prom) {
                    best_prom = prom;
                    best = q;
                }
            }
            seq_pos.erase(seq_pos.begin() + best, seq_pos.begin() + best + 2);
            seq_peak.erase(seq_peak.begin() + best, seq_peak.begin() + best + 2);
        }
        if (seq_pos.size() != target)
            throw Error(ErrorKind::ExtremaNotFound,
                        std::string(name) + ": found " + std::to_string(seq_pos.size()) +
                            " interleaved extrema, need " + std::to_string(target));

        ExtremaLayout::SwathExtrema& sw = layout.swaths[a];
        sw.present = true;
        sw.sequence.resize(target);
        for (size_t q = 0; q < target; ++q) sw.sequence[q] = seq_pos[q] + ext_lo;
    }
    (void)cal;
    return layout;
}

std::vector<LossRow> azimuth_rows(const SceneRaster& raster, const NoiseField& field,
                                  const ObjectiveParams& params) {
    std::vector<LossRow> rows;
    const double y_scale = max_field_value(field);
    for (int a = 0; a < kSwathCount; ++a) {
        if (!field.map.has_swath(a)) continue;
        const int rho = field.half_period[a];
        LineMeans means = azimuth_line_means(raster, field, swath_at(a));
        for (int i = 0; i + rho < field.rows; ++i) {
            if (!means.line_valid[i] || !means.line_valid[i + rho]) continue;
            double x_diff = means.x[i] - means.x[i + rho];
            double y_diff = means.y[i] - means.y[i + rho];
            double w = gated_weight(x_diff, y_diff, y_scale, 1.0, params);
            if (w == 0.0) continue;
            LossRow row;
            row.tag = TermTag::Azimuth;
            row.weight = w;
            row.residual_const = w * x_diff;
            row.coefficients[a] = w * y_diff;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<LossRow> intra_range_rows(const SceneRaster& raster, const NoiseField& field,
                                      const CalibrationSet& cal,
                                      const ExtremaLayout& layout,
                                      const ObjectiveParams& params) {
    std::vector<LossRow> rows;
    const double y_scale = max_field_value(field);
    const int eps = layout.epsilon;
    for (const SubswathRectangle& rect : cal.rectangles) {
        const int a = swath_index(rect.swath);
        const ExtremaLayout::SwathExtrema& sw = layout.swaths[a];
        if (!sw.present) continue;
        for (size_t q = 0; q + 1 < sw.sequence.size(); ++q) {
            const int s1 = sw.sequence[q];
            const int s2 = sw.sequence[q + 1];
            WindowMean m1, m2;
            if (!windowed_mean(raster, field, rect, s1 - eps, s1 + eps,
                               params.min_window_fraction, m1) ||
                !windowed_mean(raster, field, rect, s2 - eps, s2 + eps,
                               params.min_window_fraction, m2))
                continue;
            double x_diff = m1.x - m2.x;
            double y_diff = m1.y - m2.y;
            double w = gated_weight(x_diff, y_diff, y_scale, params.mu, params);
            if (w == 0.0) continue;
            LossRow row;
            row.tag = TermTag::IntraRange;
            row.weight = w;
            row.residual_const = w * x_diff;
            row.coefficients[a] = w * y_diff;
            rows.push_back(row);
        }
    }
    return rows;
}

std::vector<LossRow> inter_swath_rows(const SceneRaster& raster, const NoiseField& field,
                                      const CalibrationSet& cal,
                                      const ObjectiveParams& params) {
    std::vector<LossRow> rows;
    const int eps = params.epsilon;
    for (const SubswathRectangle& rect : cal.rectangles) {
        const int a = swath_index(rect.swath);
        if (a >= 4) continue; // EW5 has no right-hand neighbour
        const int i0 = std::max(0, rect.first_azimuth_line);
        const int i1 = std::min(field.rows - 1, rect.last_azimuth_line);
        const int c_last = std::min(field.cols - 1, rect.last_range_sample);
        if (i0 > i1) continue;

        // Flanking cells after the rectangle must lie in a single adjacent
        // subswath; touching two different ones means epsilon is too wide.
        int neighbour = -1;
        double sum_x2 = 0.0, sum_y2 = 0.0;
        long count2 = 0;
        const long nominal = static_cast<long>(i1 - i0 + 1) * eps;
        for (int i = i0; i <= i1; ++i) {
            for (int j = c_last + 1; j <= std::min(field.cols - 1, c_last + eps); ++j) {
                int label = field.map.swath_of(i, j);
                if (label < 0) continue;
                if (label == a || (neighbour >= 0 && label != neighbour))
                    throw Error(ErrorKind::GeometryMismatch,
                                std::string("inter-subswath window of ") +
                                    swath_name(rect.swath) + " spans swaths " +
                                    swath_name(swath_at(neighbour >= 0 ? neighbour : a)) +
                                    " and " + swath_name(swath_at(label)));
                neighbour = label;
                if (!raster.is_valid(i, j)) continue;
                sum_x2 += raster.at(i, j);
                sum_y2 += field.at(i, j);
                ++count2;
            }
        }
        if (neighbour < 0 || count2 == 0 || count2 < params.min_window_fraction * nominal)
            continue;

        WindowMean m1;
        if (!windowed_mean(raster, field, rect, c_last - eps + 1, c_last,
                           params.min_window_fraction, m1))
            continue;

        LossRow row;
        row.tag = TermTag::InterSwath;
        row.weight = 1.0;
        row.residual_const = m1.x - sum_x2 / count2;
        row.coefficients[a] = m1.y;
        row.coefficients[neighbour] = -sum_y2 / count2;
        rows.push_back(row);
    }
    return rows;
}

std::vector<LossRow> regularizer_rows(const Vec5& lambda) {
    std::vector<LossRow> rows;
    for (int a = 0; a < 5; ++a) {
        if (lambda[a] < 0.0)
            throw Error(ErrorKind::InvariantViolation,
                        std::string("negative lambda for ") + swath_name(swath_at(a)));
        LossRow row;
        row.tag = TermTag::Regularizer;
        row.weight = lambda[a];
        row.residual_const = lambda[a];
        row.coefficients[a] = lambda[a];
        rows.push_back(row);
    }
    return rows;
}

LinearSystem assemble(const std::vector<LossRow>& azimuth,
                      const std::vector<LossRow>& intra,
                      const std::vector<LossRow>& inter,
                      const std::vector<LossRow>& regularizer) {
    LinearSystem system;
    system.counts = {{TermTag::Azimuth, 0},
                     {TermTag::IntraRange, 0},
                     {TermTag::InterSwath, 0},
                     {TermTag::Regularizer, 0}};
    auto append = [&system](const std::vector<LossRow>& rows) {
        for (const LossRow& row : rows) {
            if (row.weight == 0.0) continue;
            system.rows.push_back(row);
            system.counts[row.tag] += 1;
            for (int n = 0; n < 5; ++n)
                if (row.coefficients[n] != 0.0) system.constrained[n] = true;
        }
    };
    append(azimuth);
    append(intra);
    append(inter);
    append(regularizer);
    return system;
}

LinearSystem build_system(const SceneRaster& raster, const NoiseField& field,
                          const CalibrationSet& cal, const ObjectiveParams& params) {
    ExtremaLayout layout = locate_extrema(field, cal, params.epsilon);
    return assemble(azimuth_rows(raster, field, params),
                    intra_range_rows(raster, field, cal, layout, params),
                    inter_swath_rows(raster, field, cal, params),
                    regularizer_rows(params.lambda));
}

std::string system_to_csv(const LinearSystem& system) {
    std::string out = "term,residual_const,c_ew1,c_ew2,c_ew3,c_ew4,c_ew5,weight\n";
    char buf[32];
    auto put = [&out, &buf](double v) {
        auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out.append(buf, p);
    };
    for (const LossRow& row : system.rows) {
        out += term_tag_name(row.tag);
        out += ',';
        put(row.residual_const);
        for (int n = 0; n < 5; ++n) {
            out += ',';
            put(row.coefficients[n]);
        }
        out += ',';
        put(row.weight);
        out += '\n';
    }
    return out;
}

} // namespace ewnoise
