#include "drs/vocab.hpp"

#include <fstream>
#include <stdexcept>

namespace drs::lang {

namespace {

const std::vector<std::string> kRooms = {"kitchen", "office", "hall",
                                         "lab", "storage", "lounge"};
const std::vector<std::string> kObjects = {"cup", "plate", "book", "key",
                                           "box", "bottle", "mug", "tray"};
const std::vector<std::string> kVars = {"x", "y", "z", "n"};
const std::vector<std::string> kStrings = {"\"done\"", "\"hello\"", "\"ok\"",
                                           "\"ready\"", "\"here\"", "\"busy\""};
const std::vector<std::string> kPromptWords = {
    "task", ":", ".", "world", "robot", "at", "code", "to", "then",
    "return", "collect", "and", "in", "fetch", "deliver", "go"};

struct Entry {
  const char* surface;
  TokenClass cls;
};

const Entry kFixed[] = {
    {"<bos>", TokenClass::Special},  {"<eos>", TokenClass::Special},
    {"<pad>", TokenClass::Special},  {"```", TokenClass::Special},
    {"go_to", TokenClass::KwGoTo},   {"pick", TokenClass::KwPick},
    {"place", TokenClass::KwPlace},  {"say", TokenClass::KwSay},
    {"assert", TokenClass::KwAssert},{"if", TokenClass::KwIf},
    {"else", TokenClass::KwElse},    {"repeat", TokenClass::KwRepeat},
    {"(", TokenClass::LParen},       {")", TokenClass::RParen},
    {"{", TokenClass::LBrace},       {"}", TokenClass::RBrace},
    {";", TokenClass::Semi},         {"=", TokenClass::Assign},
    {"==", TokenClass::CmpEq},       {"!=", TokenClass::CmpNe},
    {"<", TokenClass::CmpLt},        {">", TokenClass::CmpGt},
    {"<=", TokenClass::CmpLe},       {">=", TokenClass::CmpGe},
    {"+", TokenClass::Plus},         {"-", TokenClass::Minus},
    {"*", TokenClass::Star},
};

}  // namespace

const std::vector<std::string>& room_pool() { return kRooms; }
const std::vector<std::string>& object_pool() { return kObjects; }
const std::vector<std::string>& var_pool() { return kVars; }
const std::vector<std::string>& string_pool() { return kStrings; }

Vocab Vocab::robolang() {
  Vocab v;
  auto add = [&v](const std::string& s, TokenClass c) {
    v.tokens_.push_back(s);
    v.classes_.push_back(c);
  };
  for (const Entry& e : kFixed) add(e.surface, e.cls);
  add("0", TokenClass::IntZero);
  for (int d = 1; d <= 9; ++d) add(std::to_string(d), TokenClass::IntPos);
  for (const auto& r : kRooms) add(r, TokenClass::Room);
  for (const auto& o : kObjects) add(o, TokenClass::Object);
  for (const auto& x : kVars) add(x, TokenClass::Var);
  for (const auto& s : kStrings) add(s, TokenClass::Str);
  for (const auto& w : kPromptWords) add(w, TokenClass::Word);
  v.index();
  if (v.size() > 128) throw std::logic_error("vocabulary exceeds 128 entries");
  return v;
}

void Vocab::index() {
  by_surface_.clear();
  for (std::size_t i = 0; i < tokens_.size(); ++i) {
    auto [it, fresh] = by_surface_.emplace(tokens_[i], static_cast<TokenId>(i));
    if (!fresh) throw std::logic_error("duplicate vocabulary surface: " + tokens_[i]);
  }
  bos_ = id("<bos>");
  eos_ = id("<eos>");
  pad_ = id("<pad>");
  fence_ = id("```");
  if (bos_ < 0 || eos_ < 0 || pad_ < 0 || fence_ < 0) {
    throw std::logic_error("vocabulary lacks special tokens");
  }
}

TokenId Vocab::id(std::string_view surface) const {
  auto it = by_surface_.find(std::string(surface));
  return it == by_surface_.end() ? -1 : it->second;
}

std::uint64_t Vocab::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const auto& t : tokens_) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    h ^= static_cast<unsigned char>('\n');
    h *= 1099511628211ULL;
  }
  return h;
}

void Vocab::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write vocabulary: " + path);
  for (const auto& t : tokens_) out << t << '\n';
}

Vocab Vocab::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read vocabulary: " + path);
  Vocab ref = robolang();
  std::string line;
  std::size_t i = 0;
  while (std::getline(in, line)) {
    if (i >= ref.size() || line != ref.tokens_[i]) {
      throw std::runtime_error("vocabulary file does not match RoboLang at line " +
                               std::to_string(i));
    }
    ++i;
  }
  if (i != ref.size()) throw std::runtime_error("truncated vocabulary file");
  return ref;
}

}  // namespace drs::lang
