// Copyright 2026 The fpensemble Authors
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

#include "fpensemble/token.hpp"

#include "fpensemble/error.hpp"

namespace fpensemble {

Token::Token(std::string s) : surface(std::move(s)) {
  if (surface.empty()) throw Error(Errc::invalid_argument, "token surface must be non-empty");
}

const Token& end_token() {
  static const Token end{kEndSurface};
  return end;
}

std::string_view to_string(TokenizerMode mode) noexcept {
  return mode == TokenizerMode::word ? "word" : "char";
}

TokenizerMode tokenizer_mode_from_string(std::string_view name) {
  if (name == "word") return TokenizerMode::word;
  if (name == "char" || name == "character") return TokenizerMode::character;
  throw Error(Errc::invalid_argument, "unknown tokenizer mode '" + std::string(name) + "'");
}

namespace {

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

bool is_punct(unsigned char c) {
  return (c >= 0x21 && c <= 0x2f) || (c >= 0x3a && c <= 0x40) || (c >= 0x5b && c <= 0x60) ||
         (c >= 0x7b && c <= 0x7e);
}

std::size_t utf8_length(unsigned char lead) {
  if (lead < 0x80) return 1;
  if ((lead >> 5) == 0x6) return 2;
  if ((lead >> 4) == 0xe) return 3;
  if ((lead >> 3) == 0x1e) return 4;
  return 1;  // stray continuation byte: treat as its own unit
}

bool is_single_punct(const Token& t) {
  return t.surface.size() == 1 && is_punct(static_cast<unsigned char>(t.surface[0]));
}

}  // namespace

std::vector<Token> tokenize(std::string_view text, TokenizerMode mode) {
  std::vector<Token> out;
  if (mode == TokenizerMode::character) {
    for (std::size_t i = 0; i < text.size();) {
      const std::size_t len = std::min(utf8_length(static_cast<unsigned char>(text[i])),
                                       text.size() - i);
      out.emplace_back(std::string(text.substr(i, len)));
      i += len;
    }
    return out;
  }

  std::string word;
  auto flush = [&] {
    if (!word.empty()) out.emplace_back(std::move(word));
    word.clear();
  };
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (is_space(c)) {
      flush();
    } else if (is_punct(c)) {
      flush();
      out.emplace_back(std::string(1, ch));
    } else {
      word.push_back(ch);
    }
  }
  flush();
  return out;
}

void append_token(std::string& text, const Token& token, TokenizerMode mode) {
  if (mode == TokenizerMode::word && !text.empty() && !is_single_punct(token)) text.push_back(' ');
  text += token.surface;
}

std::string detokenize(std::span<const Token> tokens, TokenizerMode mode) {
  std::string out;
  for (const auto& t : tokens) append_token(out, t, mode);
  return out;
}

}  // namespace fpensemble
