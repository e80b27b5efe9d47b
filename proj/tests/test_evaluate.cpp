#include <doctest.h>

#include "error.hpp"
#include "evaluate.hpp"
#include "util.hpp"

using namespace kgw;

TEST_CASE("load_metaqa strips brackets and splits answers") {
    auto examples = load_metaqa("what films did [Stanley Kubrick] direct\tA|B\n");
    REQUIRE(examples.size() == 1);
    CHECK(examples[0].question == "what films did Stanley Kubrick direct");
    CHECK(examples[0].gold_entities == std::vector<std::string>{"A", "B"});
}

TEST_CASE("load_metaqa on an empty file gives an empty list") {
    CHECK(load_metaqa("").empty());
}

TEST_CASE("load_metaqa errors carry line numbers") {
    try {
        load_metaqa("fine [q]\tA\nno tab here\n");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 2);
    }
    try {
        load_metaqa("q\t\n");
        FAIL("expected parse error");
    } catch (const ParseError& e) {
        CHECK(e.line() == 1);
    }
}

TEST_CASE("load_metaqa applies the hop tag") {
    auto examples = load_metaqa("q one\tA\nq two\tB\n", 2);
    for (const QaExample& ex : examples) CHECK(ex.hop_count == 2);
}

TEST_CASE("hop_from_filename recognizes common spellings") {
    CHECK(hop_from_filename("qa_test_1hop.txt") == 1);
    CHECK(hop_from_filename("data/2-hop/test.txt") == 2);
    CHECK(hop_from_filename("three_3_hop.txt") == 3);
    CHECK_FALSE(hop_from_filename("questions.txt").has_value());
}

TEST_CASE("hits_at_1 finds entities and respects abstention-style misses") {
    CHECK(hits_at_1("Sergio Leone wrote it", {"Sergio Leone"}) == 1);
    CHECK(hits_at_1("I do not know the answer", {"X"}) == 0);
}

TEST_CASE("hits_at_1 matches on token boundaries only") {
    // Hand-checked: "Alex" inside "Alexander" crosses a token boundary.
    CHECK(hits_at_1("Alexander", {"Alex"}) == 0);
    CHECK(hits_at_1("Alex answered", {"Alex"}) == 1);
    CHECK(hits_at_1("ask Alex", {"Alex"}) == 1);
    CHECK(hits_at_1("Alex", {"Alex"}) == 1);
    CHECK(hits_at_1("Alex-male", {"Alex"}) == 1);  // hyphen is a boundary
}

TEST_CASE("hits_at_1 is case-insensitive") {
    CHECK(hits_at_1("rosa delgado directed it", {"Rosa Delgado"}) == 1);
    CHECK(hits_at_1("ROSA DELGADO", {"rosa delgado"}) == 1);
}

TEST_CASE("hits_at_1 is monotone under appending a gold mention") {
    const std::vector<std::string> gold{"Night Harbor"};
    const char* bases[] = {"no idea", "Night", "Harbor Night", "Night Harbors"};
    for (const char* base : bases) {
        int before = hits_at_1(base, gold);
        int after = hits_at_1(std::string(base) + " ... Night Harbor", gold);
        CHECK(after >= before);
        CHECK(after == 1);
    }
}

TEST_CASE("score_exact three-way rule") {
    CHECK(score_exact("anything", {"X"}, /*abstained=*/true) == 0);
    CHECK(score_exact("contains X here", {"X"}, false) == 1);
    CHECK(score_exact("confidently wrong", {"X"}, false) == -1);
}

TEST_CASE("aggregate computes the worked example") {
    // 2 accurate, 1 hallucinated, 1 missing.
    std::vector<EvalRecord> records;
    ExactMatchJudge judge;
    records.push_back(make_record({"q1", {"A"}, 1}, "A", false, 0.1, judge));
    records.push_back(make_record({"q2", {"B"}, 1}, "B", false, 0.2, judge));
    records.push_back(make_record({"q3", {"C"}, 2}, "wrong", false, 0.3, judge));
    records.push_back(make_record({"q4", {"D"}, 2}, "I do not know the answer", true, 0.4, judge));

    EvalReport r = aggregate(records);
    CHECK(r.overall.total == 4);
    CHECK(r.overall.accuracy() == doctest::Approx(0.50));
    CHECK(r.overall.hallucination() == doctest::Approx(0.25));
    CHECK(r.overall.missing_rate() == doctest::Approx(0.25));
    CHECK(r.overall.truthfulness() == doctest::Approx(0.25));
    CHECK(r.latency_mean_s == doctest::Approx(0.25));
    CHECK(r.latency_median_s == doctest::Approx(0.25));
}

TEST_CASE("aggregate of all-abstained runs") {
    std::vector<EvalRecord> records;
    ExactMatchJudge judge;
    for (int i = 0; i < 5; ++i)
        records.push_back(
            make_record({"q", {"X"}, 1}, "I do not know the answer", true, 0.0, judge));
    EvalReport r = aggregate(records);
    CHECK(r.overall.missing == 5);
    CHECK(r.overall.missing_rate() == 1.0);
    CHECK(r.overall.truthfulness() == 0.0);
}

TEST_CASE("count identities hold exactly on randomized score vectors") {
    SplitMix64 rng(123);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<EvalRecord> records;
        std::size_t n = 1 + rng.bounded(40);
        for (std::size_t i = 0; i < n; ++i) {
            EvalRecord r;
            r.example = {"q", {"G"}, static_cast<int>(1 + rng.bounded(3))};
            int roll = static_cast<int>(rng.bounded(3));
            r.score = roll == 0 ? 1 : roll == 1 ? 0 : -1;
            r.abstained = r.score == 0;
            r.hit_at_1 = r.score == 1 ? 1 : 0;
            records.push_back(r);
        }
        EvalReport rep = aggregate(records);
        // Exact integer identities, no float tolerance.
        CHECK(rep.overall.accurate + rep.overall.hallucinated + rep.overall.missing ==
              rep.overall.total);
        std::size_t hop_total = 0, hop_acc = 0, hop_hall = 0, hop_miss = 0, hop_hits = 0;
        for (const auto& [hop, b] : rep.per_hop) {
            CHECK(b.accurate + b.hallucinated + b.missing == b.total);
            hop_total += b.total;
            hop_acc += b.accurate;
            hop_hall += b.hallucinated;
            hop_miss += b.missing;
            hop_hits += b.hits;
        }
        // The per-hop split partitions the global counts.
        CHECK(hop_total == rep.overall.total);
        CHECK(hop_acc == rep.overall.accurate);
        CHECK(hop_hall == rep.overall.hallucinated);
        CHECK(hop_miss == rep.overall.missing);
        CHECK(hop_hits == rep.overall.hits);
    }
}

TEST_CASE("aggregate rejects empty input") {
    CHECK_THROWS_AS(aggregate({}), Error);
}

TEST_CASE("records tsv round-trips through the field escaper") {
    ExactMatchJudge judge;
    std::vector<EvalRecord> records{
        make_record({"tricky\tquestion", {"A"}, {}}, "line\nbreak A", false, 0.5, judge)};
    std::string text = eval_records_tsv(records);
    auto fields = split_record(text.substr(0, text.size() - 1));
    REQUIRE(fields.size() == 7);
    CHECK(fields[0] == "tricky\tquestion");
    CHECK(fields[6] == "line\nbreak A");
}
