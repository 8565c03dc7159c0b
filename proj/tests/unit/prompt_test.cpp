#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "coft/error.hpp"
#include "coft/pipeline.hpp"
#include "coft/prompt.hpp"

namespace {

using coft::PromptTemplate;

TEST(Prompt, QueryThenRefs) {
  const auto tpl = PromptTemplate::parse("{query}\n{refs}");
  const std::vector<std::string> refs = {"R1"};
  EXPECT_EQ(tpl.render("", "Q?", refs), "Q?\nR1");
}

TEST(Prompt, RefsRequired) {
  EXPECT_THROW(PromptTemplate::parse("{query} only"), coft::Error);
}

TEST(Prompt, UnknownOrRepeatedPlaceholders) {
  EXPECT_THROW(PromptTemplate::parse("{refs} {answer}"), coft::Error);
  EXPECT_THROW(PromptTemplate::parse("{refs} {refs}"), coft::Error);
  EXPECT_NO_THROW(PromptTemplate::parse("{refs} {not a placeholder"));
}

TEST(Prompt, DefaultTemplateJoinsRefsWithBlankLine) {
  const auto tpl = PromptTemplate::default_template();
  const std::vector<std::string> refs = {"first **ref**", "second"};
  EXPECT_EQ(tpl.render("Answer briefly.", "Who?", refs),
            "Answer briefly.\n\nQuestion: Who?\n\nReference contexts:\nfirst **ref**\n\nsecond\n");
}

TEST(Prompt, EmptyInstructionsCollapseBlankLine) {
  const auto tpl = PromptTemplate::default_template();
  const std::vector<std::string> refs = {"r"};
  EXPECT_EQ(tpl.render("", "Who?", refs), "Question: Who?\n\nReference contexts:\nr\n");
  const auto tail = PromptTemplate::parse("{refs}\n\n{instructions}");
  EXPECT_EQ(tail.render("", "q", refs), "r");
}

TEST(Prompt, ValuesAreNotReexpanded) {
  const auto tpl = PromptTemplate::parse("{query}|{refs}");
  const std::vector<std::string> refs = {"{query}"};
  EXPECT_EQ(tpl.render("", "{refs}", refs), "{refs}|{query}");
}

TEST(Prompt, CustomSeparatorAndFile) {
  const auto path = std::filesystem::temp_directory_path() / "coft_prompt_test.txt";
  std::ofstream(path) << "Q: {query}\n{refs}";
  const auto tpl = PromptTemplate::load(path);
  const std::vector<std::string> refs = {"a", "b"};
  EXPECT_EQ(tpl.render("", "x", refs), "Q: x\na\n\nb");
  EXPECT_EQ(PromptTemplate::parse("{refs}", " | ").render("", "", refs), "a | b");
  EXPECT_THROW(PromptTemplate::load("/nonexistent/template.txt"), coft::Error);
}

TEST(Prompt, AssembleUsesRecordFields) {
  coft::InputRecord r;
  r.id = "1";
  r.query = "Where?";
  r.instructions = "Be short.";
  const std::vector<std::string> refs = {"**here**"};
  EXPECT_EQ(coft::assemble_prompt(PromptTemplate::parse("{instructions} {query} {refs}"), r, refs),
            "Be short. Where? **here**");
}

}  // namespace
