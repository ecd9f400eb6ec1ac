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

#pragma once

#include <compare>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fpensemble {

/// A token is identified by its detokenized surface bytes, so models with
/// different tokenizers can be compared. Ordering is byte-wise (unsigned).
struct Token {
  std::string surface;

  Token() = default;
  explicit Token(std::string s);

  bool empty() const noexcept { return surface.empty(); }

  friend bool operator==(const Token&, const Token&) = default;
  friend std::strong_ordering operator<=>(const Token& a, const Token& b) noexcept {
    const int c = a.surface.compare(b.surface);
    return c < 0 ? std::strong_ordering::less
                 : (c > 0 ? std::strong_ordering::greater : std::strong_ordering::equal);
  }
};

using TokenSet = std::set<Token>;

/// Reserved end-of-sequence marker every provider reports in place of its own EOS.
inline const std::string kEndSurface = "<END>";
const Token& end_token();

enum class TokenizerMode { word, character };

std::string_view to_string(TokenizerMode mode) noexcept;
TokenizerMode tokenizer_mode_from_string(std::string_view name);

// Word mode splits on ASCII whitespace and emits each ASCII punctuation
// character as its own token; bytes >= 0x80 are word characters.
// Character mode emits one token per UTF-8 code point.
std::vector<Token> tokenize(std::string_view text, TokenizerMode mode = TokenizerMode::word);

/// Appends a token's surface to running text using the tokenizer's join rule.
void append_token(std::string& text, const Token& token,
                  TokenizerMode mode = TokenizerMode::word);

std::string detokenize(std::span<const Token> tokens,
                       TokenizerMode mode = TokenizerMode::word);

}  // namespace fpensemble
