#include <fstream>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "intentscape/corpus.hpp"
#include "intentscape/error.hpp"

using namespace intentscape;

namespace {

std::vector<Dialogue> parse_jsonl(const std::string& s) {
  std::istringstream in(s);
  return parse_corpus(in, CorpusFormat::jsonl);
}

Dialogue table_one() {
  return Dialogue{"m1",
                  {{"m1", 0, Channel::customer, "hello"},
                   {"m1", 1, Channel::agent,
                    "Hello there! Welcome to Inflamites Cable/Media service, how may I help you today?"},
                   {"m1", 2, Channel::customer, "i want to purchase new cable service"}}};
}

}  // namespace

TEST(ParseCorpus, GroupsRowsIntoDialogue) {
  const auto ds = parse_jsonl(
      R"({"conversationId":"d1","turnNumber":0,"channel":"customer","utterance":"hello"})"
      "\n"
      R"({"conversationId":"d1","turnNumber":1,"channel":"agent","utterance":"Hi!"})"
      "\n");
  ASSERT_EQ(ds.size(), 1u);
  ASSERT_EQ(ds[0].utterances.size(), 2u);
  EXPECT_EQ(ds[0].utterances[1].channel, Channel::agent);
  EXPECT_EQ(ds[0].utterances[1].text, "Hi!");
}

TEST(ParseCorpus, UnknownChannelNamesTheRow) {
  try {
    parse_jsonl(R"({"conversationId":"d1","turnNumber":0,"channel":"customer","utterance":"hello"})"
                "\n"
                R"({"conversationId":"d1","turnNumber":1,"channel":"bot","utterance":"beep"})"
                "\n");
    FAIL() << "expected RecordError";
  } catch (const RecordError& e) {
    EXPECT_EQ(e.row(), 2u);
    EXPECT_NE(std::string(e.what()).find("bot"), std::string::npos);
  }
}

TEST(ParseCorpus, DuplicateTurnIsCorpusError) {
  EXPECT_THROW(parse_jsonl(R"({"conversationId":"d1","turnNumber":0,"channel":"customer","utterance":"a"})"
                           "\n"
                           R"({"conversationId":"d1","turnNumber":0,"channel":"agent","utterance":"b"})"
                           "\n"),
               CorpusError);
}

TEST(ParseCorpus, GapInTurnsIsCorpusError) {
  EXPECT_THROW(parse_jsonl(R"({"conversationId":"d1","turnNumber":0,"channel":"customer","utterance":"a"})"
                           "\n"
                           R"({"conversationId":"d1","turnNumber":2,"channel":"agent","utterance":"b"})"
                           "\n"),
               CorpusError);
}

TEST(ParseCorpus, AgentOnlyDialogueIsCorpusError) {
  EXPECT_THROW(parse_jsonl(R"({"conversationId":"d1","turnNumber":0,"channel":"agent","utterance":"hi"})"
                           "\n"),
               CorpusError);
}

TEST(ParseCorpus, BlankUtteranceIsRecordError) {
  EXPECT_THROW(parse_jsonl(R"({"conversationId":"d1","turnNumber":0,"channel":"customer","utterance":"  "})"
                           "\n"),
               RecordError);
}

TEST(ParseCorpus, MultidogoCsvSample) {
  std::istringstream in(
      [] {
        std::ifstream f(INTENTSCAPE_TEST_DATA "/multidogo_sample.csv");
        std::stringstream ss;
        ss << f.rdbuf();
        return ss.str();
      }());
  const auto ds = parse_corpus(in, CorpusFormat::csv);
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds[0].id, "media-001");
  EXPECT_EQ(ds[1].id, "airline-017");
  EXPECT_EQ(ds[2].id, "finance-204");
  for (const auto& d : ds) {
    bool customer = false, agent = false;
    for (std::size_t i = 0; i < d.utterances.size(); ++i) {
      EXPECT_EQ(d.utterances[i].turn_index, static_cast<int>(i));
      customer |= d.utterances[i].channel == Channel::customer;
      agent |= d.utterances[i].channel == Channel::agent;
    }
    EXPECT_TRUE(customer && agent);
  }
  // Embedded newline normalized to a space; rows sorted by turn.
  EXPECT_EQ(ds[1].utterances[2].text, "can you pls send me my boarding pass for tomorrow");
  EXPECT_EQ(ds[2].utterances[0].text, "my credit card was lost");
}

TEST(RenderContext, TableOneLayout) {
  const auto ctx = render_context(table_one());
  EXPECT_EQ(ctx.text().rfind("customer: hello\nagent: Hello there! Welcome", 0), 0u);
  EXPECT_NE(ctx.text().find("\ncustomer: i want to purchase new cable service\n"), std::string::npos);
  EXPECT_EQ(ctx.segments().size(), 9u);
}

TEST(RenderContext, SingleTurnSegments) {
  const auto ctx = render_context(Dialogue{"d", {{"d", 0, Channel::customer, "hi"}}});
  EXPECT_EQ(ctx.text(), "customer: hi\n");
  ASSERT_EQ(ctx.segments().size(), 3u);
  const auto& s = ctx.segments();
  EXPECT_EQ(s[0].kind, SegmentKind::prefix);
  EXPECT_EQ(s[0].char_start, 0u);
  EXPECT_EQ(s[0].char_end, 10u);
  EXPECT_EQ(s[1].kind, SegmentKind::utterance);
  EXPECT_EQ(s[1].char_start, 10u);
  EXPECT_EQ(s[1].char_end, 12u);
  EXPECT_EQ(s[2].kind, SegmentKind::newline);
  EXPECT_EQ(s[2].char_end, 13u);
  EXPECT_EQ(ctx.turn_at(10), 0);
  EXPECT_FALSE(ctx.turn_at(3));
  EXPECT_FALSE(ctx.turn_at(12));
  EXPECT_FALSE(ctx.turn_at(13));
}

TEST(RenderContext, RandomDialoguesRoundTripThroughSegments) {
  std::mt19937 rng(11);
  const std::vector<std::string> words{"i", "want", "caf\xC3\xA9", "na\xC3\xAFve", "\xE2\x82\xAC" "5", "refund",
                                       "\xF0\x9F\x98\x80", "seat", "please", "bill"};
  for (int trial = 0; trial < 100; ++trial) {
    Dialogue d{"r" + std::to_string(trial), {}};
    const int turns = 1 + static_cast<int>(rng() % 6);
    for (int t = 0; t < turns; ++t) {
      std::string u;
      const int n = 1 + static_cast<int>(rng() % 8);
      for (int k = 0; k < n; ++k) u += (k ? " " : "") + words[rng() % words.size()];
      d.utterances.push_back({d.id, t, t % 2 == 0 ? Channel::customer : Channel::agent, u});
    }
    const auto ctx = render_context(d);
    std::string rebuilt;
    std::size_t cursor = 0;
    int turn = 0;
    for (const auto& s : ctx.segments()) {
      EXPECT_EQ(s.char_start, cursor);
      cursor = s.char_end;
      rebuilt += ctx.slice(s.char_start, s.char_end);
      if (s.kind == SegmentKind::utterance) {
        EXPECT_EQ(ctx.slice(s.char_start, s.char_end), d.utterances[static_cast<std::size_t>(turn)].text);
        EXPECT_EQ(ctx.turn_at(s.char_start), turn);
        EXPECT_EQ(ctx.turn_at(s.char_end - 1), turn);
      } else {
        EXPECT_FALSE(ctx.turn_at(s.char_start));
      }
      if (s.kind == SegmentKind::newline) ++turn;
    }
    EXPECT_EQ(cursor, ctx.length());
    EXPECT_EQ(rebuilt, ctx.text());
  }
}

TEST(WriteCorpus, JsonlRoundTrip) {
  const std::vector<Dialogue> ds{table_one()};
  std::ostringstream out;
  write_corpus_jsonl(out, ds);
  const auto back = parse_jsonl(out.str());
  ASSERT_EQ(back.size(), 1u);
  ASSERT_EQ(back[0].utterances.size(), 3u);
  EXPECT_EQ(back[0].utterances[1].text, ds[0].utterances[1].text);
  EXPECT_EQ(render_context(back[0]).text(), render_context(ds[0]).text());
}

TEST(ParseCorpus, CsvIgnoresExtraColumnsAndAcceptsChannel) {
  std::istringstream in(
      "sentiment,conversationId,utterance,turnNumber,channel,domain\n"
      "neutral,c1,\"hi, there\",0,Customer,media\n"
      "neutral,c1,hello,1,agent,media\n");
  const auto ds = parse_corpus(in, CorpusFormat::csv);
  ASSERT_EQ(ds.size(), 1u);
  EXPECT_EQ(ds[0].utterances[0].text, "hi, there");
  EXPECT_EQ(ds[0].utterances[1].channel, Channel::agent);
}

TEST(ParseCorpus, CsvMissingColumnIsRecordError) {
  std::istringstream in("conversationId,turnNumber,utterance\nc1,0,hi\n");
  EXPECT_THROW(parse_corpus(in, CorpusFormat::csv), RecordError);
}

TEST(ParseCorpus, CsvNonIntegerTurn) {
  std::istringstream in("conversationId,turnNumber,channel,utterance\nc1,zero,customer,hi\n");
  try {
    parse_corpus(in, CorpusFormat::csv);
    FAIL();
  } catch (const RecordError& e) {
    EXPECT_EQ(e.row(), 2u);
  }
}
