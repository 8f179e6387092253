#include "ccaprobe/report.hpp"

#include "ccaprobe/error.hpp"
#include "ccaprobe/feature_file.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace ccaprobe::report {
namespace {

constexpr std::string_view kCurveHeader =
    "basis_sensor,evaluated_sensor,method,metric,n_s,repeat,metric_before,metric_after";
constexpr std::string_view kFusionHeader =
    "first_sensor,second_sensor,acc_cca_fusion,acc_logit_sum,acc_prob_average,acc_first,acc_second,agreement,k_used";
constexpr std::string_view kSimilarityHeader =
    "mean_cca,svcca,pwcca,linear_cka,mean_cca_variance_keep,svcca_variance_keep,pwcca_variance_keep";

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines_of(std::string_view text) {
    std::vector<std::string_view> lines = split(text, '\n');
    while (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

std::vector<std::string_view> expect_table(std::string_view text, std::string_view header) {
    std::vector<std::string_view> lines = lines_of(text);
    if (lines.empty() || lines.front() != header) throw DataError("csv: unexpected header");
    lines.erase(lines.begin());
    return lines;
}

Index parse_index(std::string_view s) {
    const double v = io::parse_double(s);
    if (v != std::floor(v)) throw DataError("csv: expected an integer");
    return static_cast<Index>(v);
}

std::string fixed(double v, int digits = 4) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

}  // namespace

std::string curves_csv(std::span<const CurveResult> curves, Metric metric) {
    std::string out(kCurveHeader);
    out.push_back('\n');
    for (const CurveResult& c : curves)
        for (const CurvePoint& p : c.points) {
            out += c.basis_sensor + "," + c.evaluated_sensor + "," + std::string(to_string(c.method)) + "," +
                   std::string(to_string(metric)) + "," + std::to_string(p.n_s) + "," + std::to_string(p.repeat) +
                   "," + io::format_double(p.metric_before) + ",";
            if (p.metric_after) out += io::format_double(*p.metric_after);
            out.push_back('\n');
        }
    return out;
}

std::vector<CurveResult> parse_curves_csv(std::string_view text) {
    std::vector<CurveResult> curves;
    std::map<std::tuple<std::string, std::string, int>, std::size_t> index;
    for (std::string_view line : expect_table(text, kCurveHeader)) {
        const std::vector<std::string_view> f = split(line, ',');
        if (f.size() != 8) throw DataError("curve csv: wrong field count");
        const Method method = method_from_string(f[2]);
        metric_from_string(f[3]);
        const auto key = std::make_tuple(std::string(f[0]), std::string(f[1]), static_cast<int>(method));
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, curves.size()).first;
            CurveResult c;
            c.method = method;
            c.basis_sensor = std::string(f[0]);
            c.evaluated_sensor = std::string(f[1]);
            curves.push_back(std::move(c));
        }
        CurvePoint p;
        p.n_s = parse_index(f[4]);
        p.repeat = static_cast<int>(parse_index(f[5]));
        p.metric_before = io::parse_double(f[6]);
        if (!f[7].empty()) p.metric_after = io::parse_double(f[7]);
        if (!(p.metric_before >= 0.0 && p.metric_before <= 1.0)) throw DataError("curve csv: metric outside [0, 1]");
        curves[it->second].points.push_back(p);
    }
    for (CurveResult& c : curves) {
        std::map<Index, std::vector<const CurvePoint*>> by_ns;
        for (const CurvePoint& p : c.points) by_ns[p.n_s].push_back(&p);
        for (const auto& [n_s, pts] : by_ns) {
            CurveAggregate a;
            a.n_s = n_s;
            double sb = 0.0, sa = 0.0;
            std::size_t na = 0;
            for (const CurvePoint* p : pts) {
                sb += p->metric_before;
                if (p->metric_after) {
                    sa += *p->metric_after;
                    ++na;
                }
            }
            a.mean_before = sb / static_cast<double>(pts.size());
            double vb = 0.0, va = 0.0;
            for (const CurvePoint* p : pts) vb += (p->metric_before - a.mean_before) * (p->metric_before - a.mean_before);
            a.std_before = std::sqrt(vb / static_cast<double>(pts.size()));
            if (na == pts.size()) {
                const double ma = sa / static_cast<double>(na);
                for (const CurvePoint* p : pts) va += (*p->metric_after - ma) * (*p->metric_after - ma);
                a.mean_after = ma;
                a.std_after = std::sqrt(va / static_cast<double>(na));
            }
            c.aggregate.push_back(a);
        }
        if (!c.aggregate.empty()) c.baseline = c.aggregate.back().mean_before;
    }
    return curves;
}

std::string fusion_csv(const FusionReport& r, std::string_view first, std::string_view second) {
    std::string out(kFusionHeader);
    out += "\n" + std::string(first) + "," + std::string(second) + "," + io::format_double(r.acc_cca_fusion) + "," +
           io::format_double(r.acc_logit_sum) + "," + io::format_double(r.acc_prob_average) + "," +
           io::format_double(r.acc_first) + "," + io::format_double(r.acc_second) + "," +
           io::format_double(r.agreement) + "," + std::to_string(r.k_used) + "\n";
    return out;
}

FusionReport parse_fusion_csv(std::string_view text) {
    const std::vector<std::string_view> rows = expect_table(text, kFusionHeader);
    if (rows.size() != 1) throw DataError("fusion csv: expected one row");
    const std::vector<std::string_view> f = split(rows.front(), ',');
    if (f.size() != 9) throw DataError("fusion csv: wrong field count");
    FusionReport r;
    r.acc_cca_fusion = io::parse_double(f[2]);
    r.acc_logit_sum = io::parse_double(f[3]);
    r.acc_prob_average = io::parse_double(f[4]);
    r.acc_first = io::parse_double(f[5]);
    r.acc_second = io::parse_double(f[6]);
    r.agreement = io::parse_double(f[7]);
    r.k_used = parse_index(f[8]);
    return r;
}

std::string fusion_text(const FusionReport& r, std::string_view first, std::string_view second) {
    std::string out;
    out += "sensors             " + std::string(first) + " + " + std::string(second) + "\n";
    out += "k (summed pairs)    " + std::to_string(r.k_used) + "\n";
    out += "acc " + std::string(first) + std::string(std::max<std::size_t>(1, 16 - first.size()), ' ') +
           fixed(r.acc_first) + "\n";
    out += "acc " + std::string(second) + std::string(std::max<std::size_t>(1, 16 - second.size()), ' ') +
           fixed(r.acc_second) + "\n";
    out += "acc cca fusion      " + fixed(r.acc_cca_fusion) + "\n";
    out += "acc logit sum       " + fixed(r.acc_logit_sum) + "\n";
    out += "acc prob average    " + fixed(r.acc_prob_average) + "\n";
    out += "agreement           " + fixed(r.agreement) + "\n";
    out += "|fusion - logit|    " + fixed(std::abs(r.acc_cca_fusion - r.acc_logit_sum)) + "\n";
    return out;
}

std::string similarity_csv(const SimilarityReport& r) {
    std::string out(kSimilarityHeader);
    out += "\n" + io::format_double(r.mean_cca) + "," + io::format_double(r.svcca) + "," + io::format_double(r.pwcca) +
           "," + io::format_double(r.linear_cka) + "," + io::format_double(r.mean_cca_variance_keep) + "," +
           io::format_double(r.svcca_variance_keep) + "," + io::format_double(r.pwcca_variance_keep) + "\n";
    return out;
}

SimilarityReport parse_similarity_csv(std::string_view text) {
    const std::vector<std::string_view> rows = expect_table(text, kSimilarityHeader);
    if (rows.size() != 1) throw DataError("similarity csv: expected one row");
    const std::vector<std::string_view> f = split(rows.front(), ',');
    if (f.size() != 7) throw DataError("similarity csv: wrong field count");
    SimilarityReport r;
    r.mean_cca = io::parse_double(f[0]);
    r.svcca = io::parse_double(f[1]);
    r.pwcca = io::parse_double(f[2]);
    r.linear_cka = io::parse_double(f[3]);
    r.mean_cca_variance_keep = io::parse_double(f[4]);
    r.svcca_variance_keep = io::parse_double(f[5]);
    r.pwcca_variance_keep = io::parse_double(f[6]);
    return r;
}

std::string similarity_text(const SimilarityReport& r) {
    return "mean_cca    " + fixed(r.mean_cca) + "   (variance kept " + fixed(r.mean_cca_variance_keep) + ")\n" +
           "svcca       " + fixed(r.svcca) + "   (variance kept " + fixed(r.svcca_variance_keep) + ")\n" +
           "pwcca       " + fixed(r.pwcca) + "   (variance kept " + fixed(r.pwcca_variance_keep) + ")\n" +
           "linear_cka  " + fixed(r.linear_cka) + "\n";
}

std::string rho_text(const Vector& rho) {
    std::string out;
    for (Index i = 0; i < rho.size(); ++i) out += std::to_string(i) + " " + fixed(rho[i], 6) + "\n";
    return out;
}

}  // namespace ccaprobe::report
