#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace kgw {

struct QaExample {
    std::string question;
    std::vector<std::string> gold_entities;  // non-empty, file order
    std::optional<int> hop_count;            // 1 / 2 / 3 when known

    bool operator==(const QaExample&) const = default;
};

// MetaQA question format: `question with [entity] brackets<TAB>ans1|ans2|...`.
// Brackets are stripped from the question text. The optional hop tag applies
// to every loaded example.
std::vector<QaExample> load_metaqa(const std::string& text, std::optional<int> hop = {});

// Infers 1/2/3 from "1hop" / "1-hop" style filename fragments.
std::optional<int> hop_from_filename(const std::string& path);

// 1 iff any gold entity occurs in the response as a case-insensitive
// substring on token boundaries.
int hits_at_1(const std::string& response_text, const std::vector<std::string>& gold_entities);

// Three-way score: abstained -> 0 (missing); otherwise 1 (accurate) on an
// entity match, else -1 (incorrect). The built-in default judge; model-based
// judges plug in via ScoreJudge.
int score_exact(const std::string& response_text, const std::vector<std::string>& gold_entities,
                bool abstained);

// Pluggable judge: (question, gold, response) -> {1, 0, -1}.
class ScoreJudge {
public:
    virtual ~ScoreJudge() = default;
    virtual int score(const QaExample& example, const std::string& response_text,
                      bool abstained) = 0;
};

class ExactMatchJudge : public ScoreJudge {
public:
    int score(const QaExample& example, const std::string& response_text,
              bool abstained) override {
        return score_exact(response_text, example.gold_entities, abstained);
    }
};

struct EvalRecord {
    QaExample example;
    std::string response_text;
    bool abstained = false;
    int score = 0;       // 1 accurate, 0 missing, -1 incorrect
    int hit_at_1 = 0;    // abstentions score 0
    double latency_s = 0.0;
};

EvalRecord make_record(QaExample example, const std::string& response_text, bool abstained,
                       double latency_s, ScoreJudge& judge);

// Aggregate counts are kept as exact integers; the rate identities
// (accuracy + hallucination + missing == 1, truthfulness == accuracy -
// hallucination) hold on the counts before any float formatting.
struct EvalReport {
    struct Bucket {
        std::size_t total = 0;
        std::size_t accurate = 0;
        std::size_t hallucinated = 0;
        std::size_t missing = 0;
        std::size_t hits = 0;

        double accuracy() const { return total ? double(accurate) / double(total) : 0.0; }
        double hallucination() const { return total ? double(hallucinated) / double(total) : 0.0; }
        double missing_rate() const { return total ? double(missing) / double(total) : 0.0; }
        double truthfulness() const {
            return total ? (double(accurate) - double(hallucinated)) / double(total) : 0.0;
        }
        double hits_at_1() const { return total ? double(hits) / double(total) : 0.0; }
    };

    Bucket overall;
    std::map<int, Bucket> per_hop;  // keyed by hop tag; untagged under 0
    double latency_mean_s = 0.0;
    double latency_median_s = 0.0;
};

// Throws Usage on an empty record list.
EvalReport aggregate(const std::vector<EvalRecord>& records);

// Human-readable table.
std::string format_report(const EvalReport& report);

// Line-delimited machine records: question, hop, abstained, score, hit,
// latency, response.
std::string eval_records_tsv(const std::vector<EvalRecord>& records);

}  // namespace kgw
