#include <gtest/gtest.h>

#include "quasimean/cli/dataset.hpp"

using namespace quasimean;
using namespace quasimean::cli;

TEST(ParseDataset, MinimalCsv) {
  const Dataset d = parse_dataset("1\n2\n3\n", InputFormat::csv);
  ASSERT_EQ(d.rows.size(), 3u);
  EXPECT_FALSE(d.weighted());
  EXPECT_EQ(d.rows[2].value, 3.0);
}

TEST(ParseDataset, CsvHeaderAndWeight) {
  const Dataset d = parse_dataset("value,weight\n5,1.0\n", InputFormat::csv);
  ASSERT_EQ(d.rows.size(), 1u);
  EXPECT_TRUE(d.weighted());
  EXPECT_EQ(d.rows[0].value, 5.0);
  EXPECT_EQ(d.rows[0].weight, 1.0);
}

TEST(ParseDataset, JsonLinesRecord) {
  const Dataset d = parse_dataset("{\"value\": 2, \"weight\": 0.5}", InputFormat::json_lines);
  ASSERT_EQ(d.rows.size(), 1u);
  EXPECT_EQ(d.rows[0].value, 2.0);
  EXPECT_EQ(d.rows[0].weight, 0.5);
}

TEST(ParseDataset, CsvToleratesWhitespaceBomAndBlankLines) {
  const Dataset d = parse_dataset("\xEF\xBB\xBFx\r\n\n  1.5 , 0.25\r\n+2e0,0.75\n\n", InputFormat::csv);
  ASSERT_EQ(d.rows.size(), 2u);
  EXPECT_EQ(d.rows[0].value, 1.5);
  EXPECT_EQ(d.rows[1].value, 2.0);
  EXPECT_EQ(d.rows[1].weight, 0.75);
  EXPECT_EQ(d.sample().size(), 2u);
  EXPECT_EQ(d.weights(), (std::vector<double>{0.25, 0.75}));
}

TEST(ParseDataset, CsvErrorsCarryLineNumbers) {
  try {
    (void)parse_dataset("1\n2\nthree\n", InputFormat::csv);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW((void)parse_dataset("1,2,3\n", InputFormat::csv), ParseError);
  EXPECT_THROW((void)parse_dataset("1,abc\n", InputFormat::csv), ParseError);
  EXPECT_THROW((void)parse_dataset("1\ninf\n", InputFormat::csv), ParseError);
  EXPECT_THROW((void)parse_dataset("value\n", InputFormat::csv), ParseError);
  EXPECT_THROW((void)parse_dataset("", InputFormat::csv), ParseError);
}

TEST(ParseDataset, PartialWeightsAreRejected) {
  EXPECT_THROW((void)parse_dataset("1,0.5\n2\n", InputFormat::csv), MixedWeightError);
  EXPECT_THROW((void)parse_dataset("{\"value\":1,\"weight\":1}\n{\"value\":2}\n", InputFormat::json_lines),
               MixedWeightError);
}

TEST(ParseDataset, JsonLinesErrors) {
  try {
    (void)parse_dataset("{\"value\": 1}\n{\"value\": \"x\"}\n", InputFormat::json_lines);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW((void)parse_dataset("[1]\n", InputFormat::json_lines), ParseError);
  EXPECT_THROW((void)parse_dataset("{\"value\": 1\n", InputFormat::json_lines), ParseError);
  EXPECT_THROW((void)parse_dataset("{\"value\": 1, \"weight\": \"a\"}\n", InputFormat::json_lines), ParseError);
  const Dataset d = parse_dataset("{\"value\": 1, \"weight\": null}\n", InputFormat::json_lines);
  EXPECT_FALSE(d.weighted());
}

TEST(ParseDataset, FormatFromPath) {
  EXPECT_EQ(format_for_path("data.jsonl"), InputFormat::json_lines);
  EXPECT_EQ(format_for_path("data.ndjson"), InputFormat::json_lines);
  EXPECT_EQ(format_for_path("data.csv"), InputFormat::csv);
  EXPECT_EQ(format_for_path("-"), InputFormat::csv);
}
