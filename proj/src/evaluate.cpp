#include "evaluate.hpp"

#include <algorithm>
#include <sstream>

#include "error.hpp"
#include "util.hpp"

namespace kgw {

std::vector<QaExample> load_metaqa(const std::string& text, std::optional<int> hop) {
    std::vector<QaExample> out;
    std::istringstream in(text);
    std::string raw;
    std::size_t lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        if (raw.empty()) continue;
        std::size_t tab = raw.find('\t');
        if (tab == std::string::npos) throw ParseError(lineno, "missing TAB separator");

        QaExample ex;
        ex.hop_count = hop;
        // Topic-entity brackets are markup, not question text.
        for (char c : raw.substr(0, tab))
            if (c != '[' && c != ']') ex.question.push_back(c);

        for (const std::string& ans : split(raw.substr(tab + 1), '|'))
            if (!ans.empty()) ex.gold_entities.push_back(ans);
        if (ex.gold_entities.empty()) throw ParseError(lineno, "empty answer list");
        out.push_back(std::move(ex));
    }
    return out;
}

std::optional<int> hop_from_filename(const std::string& path) {
    for (int h : {1, 2, 3}) {
        std::string d = std::to_string(h);
        if (path.find(d + "hop") != std::string::npos ||
            path.find(d + "-hop") != std::string::npos ||
            path.find(d + "_hop") != std::string::npos)
            return h;
    }
    return std::nullopt;
}

namespace {

bool is_alnum_ascii(char c) {
    return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
}

// Case-insensitive substring occurrence with token boundaries at both ends.
bool contains_on_token_boundary(const std::string& haystack_lower,
                                const std::string& needle_lower) {
    if (needle_lower.empty()) return false;
    std::size_t pos = 0;
    while ((pos = haystack_lower.find(needle_lower, pos)) != std::string::npos) {
        bool left_ok = pos == 0 || !is_alnum_ascii(haystack_lower[pos - 1]) ||
                       !is_alnum_ascii(needle_lower.front());
        std::size_t end = pos + needle_lower.size();
        bool right_ok = end == haystack_lower.size() || !is_alnum_ascii(haystack_lower[end]) ||
                        !is_alnum_ascii(needle_lower.back());
        if (left_ok && right_ok) return true;
        ++pos;
    }
    return false;
}

}  // namespace

int hits_at_1(const std::string& response_text, const std::vector<std::string>& gold_entities) {
    if (gold_entities.empty()) throw usage_error("gold entity set is empty");
    std::string response = to_lower_ascii(response_text);
    for (const std::string& gold : gold_entities)
        if (contains_on_token_boundary(response, to_lower_ascii(gold))) return 1;
    return 0;
}

int score_exact(const std::string& response_text, const std::vector<std::string>& gold_entities,
                bool abstained) {
    if (abstained) return 0;
    return hits_at_1(response_text, gold_entities) ? 1 : -1;
}

EvalRecord make_record(QaExample example, const std::string& response_text, bool abstained,
                       double latency_s, ScoreJudge& judge) {
    EvalRecord r;
    r.response_text = response_text;
    r.abstained = abstained;
    r.score = judge.score(example, response_text, abstained);
    r.hit_at_1 = abstained ? 0 : hits_at_1(response_text, example.gold_entities);
    r.latency_s = latency_s;
    r.example = std::move(example);
    return r;
}

EvalReport aggregate(const std::vector<EvalRecord>& records) {
    if (records.empty()) throw usage_error("cannot aggregate an empty record list");
    EvalReport report;
    std::vector<double> latencies;
    latencies.reserve(records.size());
    for (const EvalRecord& r : records) {
        auto bump = [&](EvalReport::Bucket& b) {
            ++b.total;
            if (r.score == 1) ++b.accurate;
            else if (r.score == -1) ++b.hallucinated;
            else ++b.missing;
            if (r.hit_at_1) ++b.hits;
        };
        bump(report.overall);
        bump(report.per_hop[r.example.hop_count.value_or(0)]);
        latencies.push_back(r.latency_s);
    }
    double sum = 0.0;
    for (double v : latencies) sum += v;
    report.latency_mean_s = sum / double(latencies.size());
    std::sort(latencies.begin(), latencies.end());
    std::size_t mid = latencies.size() / 2;
    report.latency_median_s = latencies.size() % 2 ? latencies[mid]
                                                   : (latencies[mid - 1] + latencies[mid]) / 2.0;
    return report;
}

namespace {

std::string pct(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%6.2f%%", v * 100.0);
    return buf;
}

void format_bucket(std::ostringstream& out, const std::string& name,
                   const EvalReport::Bucket& b) {
    out << "  " << name << "  n=" << b.total << "  hits@1=" << pct(b.hits_at_1())
        << "  accuracy=" << pct(b.accuracy()) << "  hallucination=" << pct(b.hallucination())
        << "  missing=" << pct(b.missing_rate()) << "  truthfulness=" << pct(b.truthfulness())
        << "\n";
}

}  // namespace

std::string format_report(const EvalReport& report) {
    std::ostringstream out;
    out << "evaluation report\n";
    format_bucket(out, "overall", report.overall);
    for (const auto& [hop, bucket] : report.per_hop) {
        if (hop == 0 && report.per_hop.size() == 1) break;  // nothing tagged
        format_bucket(out, hop ? std::to_string(hop) + "-hop " : "untagged", bucket);
    }
    char buf[96];
    std::snprintf(buf, sizeof(buf), "  latency  mean=%.4fs  median=%.4fs\n",
                  report.latency_mean_s, report.latency_median_s);
    out << buf;
    return out.str();
}

std::string eval_records_tsv(const std::vector<EvalRecord>& records) {
    std::string out;
    for (const EvalRecord& r : records) {
        char latency[32];
        std::snprintf(latency, sizeof(latency), "%.6f", r.latency_s);
        out += join_record({r.example.question,
                            r.example.hop_count ? std::to_string(*r.example.hop_count) : "",
                            r.abstained ? "1" : "0", std::to_string(r.score),
                            std::to_string(r.hit_at_1), latency, r.response_text});
        out.push_back('\n');
    }
    return out;
}

}  // namespace kgw
