// Copyright 2026 The stancekit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "stancekit/data.h"
#include "test_util.h"

namespace stancekit {
namespace {

Dataset parse(const std::string& csv, LoadOptions opts = {}) {
  std::istringstream in(csv);
  return read_dataset(in, opts);
}

std::string error_of(const std::string& csv) {
  try {
    parse(csv);
  } catch (const Error& e) {
    return std::string(error_code_name(e.code())) + ": " + e.what();
  }
  return "";
}

TEST(Csv, QuotingBomAndCrlf) {
  const Dataset ds = parse(
      "\xEF\xBB\xBFtext,id,target,stance\r\n"
      "\"hello, \"\"world\"\"\",1,women_empowerment,favor\r\n"
      "\"multi\nline\",2,covid_vaccine,AGAINST\r\n"
      "plain,3,digital_transformation,None");
  ASSERT_EQ(ds.size(), 3u);
  EXPECT_EQ(ds.records[0].text, "hello, \"world\"");
  EXPECT_EQ(ds.records[0].stance, "Favor");
  EXPECT_EQ(ds.records[1].text, "multi\nline");
  EXPECT_EQ(ds.records[1].stance, "Against");
  EXPECT_EQ(ds.records[2].id, "3");
  EXPECT_FALSE(ds.has_split_column);
  EXPECT_EQ(ds.targets(),
            (std::vector<std::string>{"women_empowerment", "covid_vaccine",
                                      "digital_transformation"}));
}

TEST(Csv, SplitColumn) {
  const Dataset ds = parse("id,target,text,stance,split\n1,t,a,Favor,train\n2,t,b,None,dev\n");
  EXPECT_TRUE(ds.has_split_column);
  EXPECT_EQ(ds.records[1].split, Split::kDev);
  const auto cs = split_by_column(ds);
  EXPECT_EQ(cs.train.size(), 1u);
  EXPECT_EQ(cs.dev.size(), 1u);
  EXPECT_EQ(cs.test.size(), 0u);
}

TEST(Csv, Errors) {
  EXPECT_NE(error_of("id,target,text\n1,t,a\n").find("MissingColumn"), std::string::npos);
  const std::string bad = error_of("id,target,text,stance\n1,t,a,Favor\n2,t,b,maybe\n");
  EXPECT_NE(bad.find("BadLabel"), std::string::npos) << bad;
  EXPECT_NE(bad.find("3"), std::string::npos) << bad;
  EXPECT_NE(error_of("id,target,text,stance\n1,t,a,Favor\n1,t,b,None\n").find("DuplicateId"),
            std::string::npos);
  EXPECT_NE(error_of("id,target,text,stance\n1,t,a\xff,Favor\n").find("EncodingError"),
            std::string::npos);
  EXPECT_NE(error_of("id,target,text,stance\n1,t,\"open,Favor\n").find("Format"),
            std::string::npos);
  EXPECT_NE(error_of("id,target,text,stance\n1,t,a\n").find("Format"), std::string::npos);
}

TEST(Csv, UnlabeledInput) {
  const Dataset ds = parse("id,target,text\n1,t,a\n", LoadOptions{.require_stance = false});
  EXPECT_EQ(ds.records[0].stance, "");
}

TEST(Csv, WriteReadRoundTrip) {
  const Dataset ds = parse(
      "id,target,text,stance,split\n"
      "a,t1,\"x, y\",Favor,train\n"
      "b,t2,\"q\"\"uote\nline\",None,test\n"
      "c,t1,كلمة,Against,dev\n");
  std::ostringstream out;
  write_dataset(out, ds);
  EXPECT_EQ(parse(out.str()), ds);
  std::ostringstream again;
  write_dataset(again, parse(out.str()));
  EXPECT_EQ(again.str(), out.str());
}

TEST(Csv, LoadFixture) {
  const Dataset ds = load_dataset(testutil::data_path("synthetic60.csv"));
  EXPECT_EQ(ds.size(), 60u);
  EXPECT_EQ(ds.targets().size(), 3u);
  EXPECT_ERROR_CODE(load_dataset(testutil::data_path("missing.csv")), ErrorCode::kIo);
}

TEST(Stats, Counts) {
  const Dataset ds = parse(
      "id,target,text,stance\n1,women_empowerment,a,Favor\n2,covid,b,None\n3,covid,c,Against\n");
  const auto rows = dataset_stats(ds);
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_EQ(rows[0], (StatsRow{"covid", 2, 0, 1, 1}));
  EXPECT_EQ(rows[1], (StatsRow{"women_empowerment", 1, 1, 0, 0}));
  EXPECT_EQ(rows[2], (StatsRow{"All", 3, 1, 1, 1}));
  const auto only = dataset_stats(ds.filter_target("women_empowerment"));
  ASSERT_EQ(only.size(), 2u);
  EXPECT_EQ(only[0], (StatsRow{"women_empowerment", 1, 1, 0, 0}));
}

TEST(Stats, ReferenceTable) {
  const auto& ref = mawqif_reference_stats();
  ASSERT_EQ(ref.size(), 4u);
  EXPECT_EQ(ref[0].tweets, 1167u);
  EXPECT_EQ(ref[1].tweets, 1145u);
  EXPECT_EQ(ref[2].tweets, 1190u);
  EXPECT_EQ(ref[3], (StatsRow{"All", 3502, 2154, 1020, 332}));
  EXPECT_EQ(ref[0].favor + ref[0].against + ref[0].none, 1167u);
  // reference rows that do not add up are reported
  const auto notes = compare_with_reference(ref);
  bool flagged = false;
  for (const auto& n : notes) flagged |= n.find("favor+against+none") != std::string::npos;
  EXPECT_TRUE(flagged);
  EXPECT_FALSE(render_stats(ref).empty());
}

TEST(Stats, CompareFlagsMismatch) {
  auto rows = mawqif_reference_stats();
  rows[0].tweets -= 1;
  const auto base = compare_with_reference(mawqif_reference_stats()).size();
  EXPECT_GT(compare_with_reference(rows).size(), base);
}

Dataset synthetic(size_t per_stratum_favor, size_t per_stratum_none) {
  Dataset ds;
  int id = 0;
  for (const char* target : {"t1", "t2"}) {
    for (size_t i = 0; i < per_stratum_favor; ++i) {
      ds.records.push_back({std::to_string(id++), target, "x", "Favor", std::nullopt});
    }
    for (size_t i = 0; i < per_stratum_none; ++i) {
      ds.records.push_back({std::to_string(id++), target, "x", "None", std::nullopt});
    }
  }
  return ds;
}

TEST(Split, ProportionsAndDisjointness) {
  const Dataset ds = synthetic(17, 6);
  for (double f : {0.1, 0.2, 0.35, 0.5}) {
    const auto s = stratified_split(ds, f, 42);
    EXPECT_EQ(s.train.size() + s.dev.size(), ds.size());
    EXPECT_EQ(s.dev.size(), static_cast<size_t>(std::llround(ds.size() * f)));
    std::map<std::string, int> seen;
    for (const auto& r : s.train.records) ++seen[r.id];
    for (const auto& r : s.dev.records) ++seen[r.id];
    EXPECT_EQ(seen.size(), ds.size());
    // each stratum within one of its proportional share
    std::map<std::pair<std::string, std::string>, int> total, dev;
    for (const auto& r : ds.records) ++total[{r.target, r.stance}];
    for (const auto& r : s.dev.records) ++dev[{r.target, r.stance}];
    for (const auto& [key, n] : total) {
      EXPECT_LE(std::abs(dev[key] - n * f), 1.0);
    }
  }
}

TEST(Split, DeterministicAndSeedSensitive) {
  const Dataset ds = synthetic(20, 20);
  const auto a = stratified_split(ds, 0.3, 1);
  EXPECT_EQ(stratified_split(ds, 0.3, 1).dev, a.dev);
  EXPECT_NE(stratified_split(ds, 0.3, 2).dev, a.dev);
  // order preserved
  for (size_t i = 1; i < a.train.size(); ++i) {
    EXPECT_LT(std::stoi(a.train.records[i - 1].id), std::stoi(a.train.records[i].id));
  }
}

TEST(Split, TinyStratumKeepsOneInTrain) {
  Dataset ds;
  ds.records.push_back({"1", "t", "x", "Favor", std::nullopt});
  ds.records.push_back({"2", "t", "x", "None", std::nullopt});
  ds.records.push_back({"3", "t", "x", "None", std::nullopt});
  const auto s = stratified_split(ds, 0.9, 3);
  bool favor_in_train = false;
  for (const auto& r : s.train.records) favor_in_train |= r.stance == "Favor";
  EXPECT_TRUE(favor_in_train);
  EXPECT_FALSE(s.warnings.empty());
}

TEST(Split, RejectsBadFraction) {
  const Dataset ds = synthetic(2, 2);
  EXPECT_ERROR_CODE(stratified_split(ds, 0.0, 1), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(stratified_split(ds, 1.0, 1), ErrorCode::kInvalidArgument);
  EXPECT_ERROR_CODE(split_by_column(ds), ErrorCode::kMissingColumn);
}

EmbeddingTable parse_emb(const std::string& s) {
  std::istringstream in(s);
  return read_embeddings(in);
}

TEST(Embeddings, ParseAndRoundTrip) {
  const auto t = parse_emb("{\"id\":\"a\",\"v\":[1,0.1,-2.5e-3]}\n\n{\"id\":\"b\",\"v\":[0,0,1e300]}\n");
  EXPECT_EQ(t.dim, 3u);
  EXPECT_EQ(t.ids, (std::vector<std::string>{"a", "b"}));
  EXPECT_EQ((*t.find("a"))[1], 0.1);
  EXPECT_EQ(t.find("zz"), nullptr);
  std::ostringstream out;
  write_embeddings(out, t);
  const auto back = parse_emb(out.str());
  EXPECT_EQ(back.ids, t.ids);
  EXPECT_EQ(back.vectors, t.vectors);
}

TEST(Embeddings, Errors) {
  EXPECT_ERROR_CODE(parse_emb("{\"id\":\"a\",\"v\":[1,2]}\n{\"id\":\"b\",\"v\":[1]}\n"),
                    ErrorCode::kDimensionMismatch);
  EXPECT_ERROR_CODE(parse_emb("{\"id\":\"a\",\"v\":[1]}\n{\"id\":\"a\",\"v\":[2]}\n"),
                    ErrorCode::kDuplicateId);
  EXPECT_ERROR_CODE(parse_emb("{\"id\":\"a\",\"v\":[1e999]}\n"), ErrorCode::kNonFiniteValue);
  EXPECT_ERROR_CODE(parse_emb("{\"id\":\"a\",\"v\":[\"x\"]}\n"), ErrorCode::kFormat);
  EXPECT_ERROR_CODE(parse_emb("not json\n"), ErrorCode::kFormat);
  EXPECT_ERROR_CODE(parse_emb("{\"v\":[1]}\n"), ErrorCode::kFormat);
}

TEST(Embeddings, Join) {
  const auto t = parse_emb("{\"id\":\"2\",\"v\":[0,1]}\n{\"id\":\"1\",\"v\":[1,0]}\n");
  Dataset ds;
  ds.records.push_back({"1", "t", "x", "Favor", std::nullopt});
  ds.records.push_back({"2", "t", "x", "None", std::nullopt});
  const auto aligned = join_embeddings(ds, t);
  EXPECT_EQ(aligned.labels, (std::vector<std::string>{"Favor", "None"}));
  EXPECT_EQ(aligned.x[0].to_dense(), (std::vector<double>{1.0, 0.0}));
  ds.records.push_back({"3", "t", "x", "None", std::nullopt});
  try {
    join_embeddings(ds, t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingEmbedding);
    EXPECT_NE(std::string(e.what()).find("3"), std::string::npos);
  }
}

TEST(Embeddings, Fixture) {
  const auto t = load_embeddings(testutil::data_path("synthetic60_emb.jsonl"));
  EXPECT_EQ(t.dim, 8u);
  EXPECT_EQ(t.ids.size(), 60u);
  const auto aligned = join_embeddings(load_dataset(testutil::data_path("synthetic60.csv")), t);
  EXPECT_EQ(aligned.x.size(), 60u);
}

}  // namespace
}  // namespace stancekit
