// Copyright 2026 The LDHD Toolkit Authors
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

#include "ldhd/tasks.h"

#include <algorithm>
#include <charconv>

namespace ldhd::tasks {

namespace {

using Digits = std::vector<int>;  // least significant first

[[noreturn]] void Fail(const std::string& what) { throw Error(ErrorCode::kParseError, what); }

[[noreturn]] void BadLatent(const std::string& what) {
  throw Error(ErrorCode::kInvalidArgument, "invalid latent: " + what);
}

Digits Add(const Digits& a, const Digits& b) {
  Digits out;
  int carry = 0;
  for (std::size_t k = 0; k < std::max(a.size(), b.size()) || carry; ++k) {
    const int s = (k < a.size() ? a[k] : 0) + (k < b.size() ? b[k] : 0) + carry;
    out.push_back(s % 10);
    carry = s / 10;
  }
  return out;
}

Digits MulSmall(const Digits& a, int x) {
  Digits out;
  int carry = 0;
  for (std::size_t k = 0; k < a.size() || carry; ++k) {
    const int s = (k < a.size() ? a[k] * x : 0) + carry;
    out.push_back(s % 10);
    carry = s / 10;
  }
  return out;
}

// Quotient digits, same length as a.
Digits DivSmall(const Digits& a, int x) {
  Digits out(a.size(), 0);
  int rem = 0;
  for (std::size_t k = a.size(); k-- > 0;) {
    const int cur = rem * 10 + a[k];
    out[k] = cur / x;
    rem = cur % x;
  }
  return out;
}

void StripLeadingZeros(Digits& d) {
  while (d.size() > 1 && d.back() == 0) d.pop_back();
}

Digits PadTo(Digits d, std::size_t width) {
  d.resize(std::max(d.size(), width), 0);
  return d;
}

std::string DigitToken(int d) { return std::string(1, static_cast<char>('0' + d)); }

void AppendDigits(std::vector<std::string>& tokens, const Digits& d) {
  for (int v : d) tokens.push_back(DigitToken(v));
}

// Significant length: index of the highest nonzero digit plus one.
std::size_t SignificantLength(const Digits& d) {
  std::size_t n = d.size();
  while (n > 0 && d[n - 1] == 0) --n;
  return n;
}

bool IsDigitToken(const std::string& t) { return t.size() == 1 && t[0] >= '0' && t[0] <= '9'; }

int TokenDigit(const std::string& t) {
  if (!IsDigitToken(t)) Fail("expected a digit, got '" + t + "'");
  return t[0] - '0';
}

int ComponentCount(TaskKind kind) {
  switch (kind) {
    case TaskKind::kUnalignedCopy:
    case TaskKind::kParityCot:
      return 1;
    default:
      return 2;
  }
}

void CheckDigit(int v, int hi, const char* what) {
  if (v < 0 || v > hi) BadLatent(std::string(what) + " out of range");
}

// Addends x and y from a two-component latent.
std::pair<Digits, Digits> Addends(const LatentVariable& l) {
  Digits x, y;
  for (const auto& e : l.entries) {
    CheckDigit(e[0], 9, "digit");
    CheckDigit(e[1], 9, "digit");
    x.push_back(e[0]);
    y.push_back(e[1]);
  }
  return {x, y};
}

// (x, y) of mul-1n / div-n1 with y least significant first.
std::pair<int, Digits> ScalarAndNumber(const LatentVariable& l) {
  const int x = l.entries.front()[0];
  CheckDigit(x, 9, "multiplier");
  if (x == 0) BadLatent("single-digit operand must be nonzero");
  Digits y;
  for (const auto& e : l.entries) {
    if (e[0] != x) BadLatent("single-digit operand differs across dimensions");
    CheckDigit(e[1], 9, "digit");
    y.push_back(e[1]);
  }
  if (l.kind == TaskKind::kDivN1) std::reverse(y.begin(), y.end());
  return {x, y};
}

// Output digit of each latent dimension (the chain-of-thought component).
std::vector<int> PerDimensionOutputs(const LatentVariable& l) {
  const int n = l.dimension();
  std::vector<int> out(n);
  switch (l.kind) {
    case TaskKind::kUrfAddition:
    case TaskKind::kArfAddition: {
      const auto [x, y] = Addends(l);
      const Digits z = Add(x, y);
      for (int k = 0; k < n; ++k) out[k] = z[k];
      break;
    }
    case TaskKind::kUnalignedCopy:
      for (int k = 0; k < n; ++k) out[k] = l.entries[k][0];
      break;
    case TaskKind::kParityCot: {
      int acc = 0;
      for (int k = 0; k < n; ++k) out[k] = acc ^= l.entries[k][0];
      break;
    }
    case TaskKind::kMul1N: {
      const auto [x, y] = ScalarAndNumber(l);
      const Digits z = MulSmall(y, x);
      for (int k = 0; k < n; ++k) out[k] = z[k];
      break;
    }
    case TaskKind::kDivN1: {
      const auto [x, y] = ScalarAndNumber(l);
      const Digits z = DivSmall(y, x);
      for (int k = 0; k < n; ++k) out[k] = z[n - 1 - k];
      break;
    }
    case TaskKind::kAdditionMod10:
      break;
  }
  return out;
}

}  // namespace

std::string_view TaskName(TaskKind kind) {
  switch (kind) {
    case TaskKind::kUrfAddition: return "urf-add";
    case TaskKind::kArfAddition: return "arf-add";
    case TaskKind::kUnalignedCopy: return "copy";
    case TaskKind::kParityCot: return "parity-cot";
    case TaskKind::kMul1N: return "mul-1n";
    case TaskKind::kDivN1: return "div-n1";
    case TaskKind::kAdditionMod10: return "add-mod10";
  }
  return "unknown";
}

TaskKind ParseTaskKind(std::string_view name) {
  for (TaskKind k : kAllTasks) {
    if (TaskName(k) == name) return k;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown task '" + std::string(name) + "'");
}

std::string LatentVariable::ToText() const {
  std::string out;
  for (std::size_t k = 0; k < entries.size(); ++k) {
    if (k > 0) out += ' ';
    for (std::size_t c = 0; c < entries[k].size(); ++c) {
      if (c > 0) out += ',';
      out += entries[k][c] == kUndetermined ? "*" : std::to_string(entries[k][c]);
    }
  }
  return out;
}

LatentVariable LatentVariable::FromText(TaskKind kind, std::string_view text) {
  LatentVariable l;
  l.kind = kind;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(' ', pos), text.size());
    const std::string_view dim = text.substr(pos, end - pos);
    if (dim.empty()) Fail("empty latent dimension");
    std::vector<int> entry;
    std::size_t cpos = 0;
    while (cpos <= dim.size()) {
      const std::size_t cend = std::min(dim.find(',', cpos), dim.size());
      const std::string_view comp = dim.substr(cpos, cend - cpos);
      if (comp == "*") {
        entry.push_back(kUndetermined);
      } else {
        int v = 0;
        const auto [ptr, ec] = std::from_chars(comp.data(), comp.data() + comp.size(), v);
        if (comp.empty() || ec != std::errc() || ptr != comp.data() + comp.size() || v < 0) {
          Fail("bad latent component '" + std::string(comp) + "'");
        }
        entry.push_back(v);
      }
      cpos = cend + 1;
    }
    l.entries.push_back(std::move(entry));
    pos = end + 1;
  }
  return l;
}

std::string TaskInstance::InputText() const { return JoinTokens(input_tokens); }
std::string TaskInstance::TargetText() const { return JoinTokens(target_tokens); }

Rng::Rng(uint64_t seed, uint64_t shard) {
  std::seed_seq seq{static_cast<uint32_t>(seed), static_cast<uint32_t>(seed >> 32),
                    static_cast<uint32_t>(shard), static_cast<uint32_t>(shard >> 32)};
  gen_.seed(seq);
}

uint64_t Rng::Below(uint64_t bound) {
  if (bound == 0) throw Error(ErrorCode::kInvalidArgument, "empty range");
  // Reject the low (2^64 mod bound) values so every residue is equally likely.
  const uint64_t threshold = (0 - bound) % bound;
  while (true) {
    const uint64_t r = gen_();
    if (r >= threshold) return r % bound;
  }
}

int Rng::Between(int lo, int hi) {
  return lo + static_cast<int>(Below(static_cast<uint64_t>(hi - lo) + 1));
}

namespace {

// n digits, least significant first, with a nonzero most significant digit.
Digits SampleNumber(int n, Rng& rng) {
  Digits d(n);
  for (int k = 0; k + 1 < n; ++k) d[k] = rng.Between(0, 9);
  d[n - 1] = rng.Between(1, 9);
  return d;
}

std::pair<int, int> SampleAddendLengths(int n, ScaleMode mode, Rng& rng) {
  if (mode == ScaleMode::kUpTo) return {rng.Between(1, n), rng.Between(1, n)};
  // The 2n - 1 pairs whose larger entry is n.
  const int r = static_cast<int>(rng.Below(2 * static_cast<uint64_t>(n) - 1));
  return r < n ? std::pair{n, r + 1} : std::pair{r - n + 1, n};
}

}  // namespace

TaskInstance SampleInstance(TaskKind kind, int scale, ScaleMode mode, Rng& rng, int width) {
  if (scale < 1) {
    throw Error(ErrorCode::kInvalidScale, "scale must be at least 1, got " + std::to_string(scale));
  }
  if (kind == TaskKind::kArfAddition) {
    if (width == 0) width = scale;
    if (width < scale) throw Error(ErrorCode::kInvalidScale, "ARF width below scale");
  }
  LatentVariable l;
  l.kind = kind;
  switch (kind) {
    case TaskKind::kUrfAddition:
    case TaskKind::kArfAddition:
    case TaskKind::kAdditionMod10: {
      const auto [n1, n2] = SampleAddendLengths(scale, mode, rng);
      const Digits x = SampleNumber(n1, rng);
      const Digits y = SampleNumber(n2, rng);
      for (int k = 0; k < std::max(n1, n2); ++k) {
        l.entries.push_back({k < n1 ? x[k] : 0, k < n2 ? y[k] : 0});
      }
      break;
    }
    case TaskKind::kUnalignedCopy:
    case TaskKind::kParityCot: {
      const int n = mode == ScaleMode::kUpTo ? rng.Between(1, scale) : scale;
      const int hi = kind == TaskKind::kParityCot ? 1 : 9;
      for (int k = 0; k < n; ++k) l.entries.push_back({rng.Between(0, hi)});
      break;
    }
    case TaskKind::kMul1N:
    case TaskKind::kDivN1: {
      const int n = mode == ScaleMode::kUpTo ? rng.Between(1, scale) : scale;
      const int x = rng.Between(1, 9);
      Digits y = SampleNumber(n, rng);
      if (kind == TaskKind::kDivN1) std::reverse(y.begin(), y.end());
      for (int k = 0; k < n; ++k) l.entries.push_back({x, y[k]});
      break;
    }
  }
  return FormatInstance(l, kind == TaskKind::kArfAddition ? width : 0);
}

TaskInstance FormatInstance(const LatentVariable& latent, int width) {
  const int n = latent.dimension();
  if (n < 1) throw Error(ErrorCode::kInvalidScale, "latent has no dimensions");
  for (const auto& e : latent.entries) {
    if (static_cast<int>(e.size()) != ComponentCount(latent.kind)) {
      BadLatent("wrong component count for " + std::string(TaskName(latent.kind)));
    }
  }
  TaskInstance t;
  t.kind = latent.kind;
  t.scale = n;
  t.latent = latent;
  auto& in = t.input_tokens;
  auto& out = t.target_tokens;
  in.push_back("b");
  switch (latent.kind) {
    case TaskKind::kUrfAddition:
    case TaskKind::kAdditionMod10: {
      auto [x, y] = Addends(latent);
      const Digits sum = Add(x, y);
      x.resize(SignificantLength(x));
      y.resize(SignificantLength(y));
      if (x.empty() || y.empty()) BadLatent("addends must be positive");
      if (std::max(x.size(), y.size()) != static_cast<std::size_t>(n)) {
        BadLatent("top dimension carries only zeros");
      }
      AppendDigits(in, x);
      in.push_back("+");
      AppendDigits(in, y);
      in.push_back("=");
      if (latent.kind == TaskKind::kUrfAddition) {
        Digits z = sum;
        StripLeadingZeros(z);
        AppendDigits(out, z);
      } else {
        out.push_back(DigitToken(sum[0]));
      }
      break;
    }
    case TaskKind::kArfAddition: {
      if (width == 0) width = n;
      if (width < n) throw Error(ErrorCode::kInvalidScale, "ARF width below scale");
      auto [x, y] = Addends(latent);
      if (std::max(SignificantLength(x), SignificantLength(y)) != static_cast<std::size_t>(n) ||
          SignificantLength(x) == 0 || SignificantLength(y) == 0) {
        BadLatent("addends must be positive with a nonzero top dimension");
      }
      t.width = width;
      AppendDigits(in, PadTo(x, width));
      in.push_back("+");
      AppendDigits(in, PadTo(y, width));
      in.push_back("=");
      AppendDigits(out, PadTo(Add(x, y), width + 1));
      break;
    }
    case TaskKind::kUnalignedCopy:
    case TaskKind::kParityCot: {
      const int hi = latent.kind == TaskKind::kParityCot ? 1 : 9;
      for (const auto& e : latent.entries) {
        CheckDigit(e[0], hi, "symbol");
        in.push_back(DigitToken(e[0]));
      }
      in.push_back("=");
      for (int v : PerDimensionOutputs(latent)) out.push_back(DigitToken(v));
      break;
    }
    case TaskKind::kMul1N: {
      const auto [x, y] = ScalarAndNumber(latent);
      if (y.back() == 0) BadLatent("leading zero in the multi-digit operand");
      in.push_back(DigitToken(x));
      in.push_back("*");
      AppendDigits(in, y);
      in.push_back("=");
      AppendDigits(out, PadTo(MulSmall(y, x), n + 1));
      break;
    }
    case TaskKind::kDivN1: {
      const auto [x, y] = ScalarAndNumber(latent);
      if (y.back() == 0) BadLatent("leading zero in the multi-digit operand");
      in.push_back(DigitToken(x));
      in.push_back("\\");
      for (const auto& e : latent.entries) in.push_back(DigitToken(e[1]));
      in.push_back("=");
      for (int v : PerDimensionOutputs(latent)) out.push_back(DigitToken(v));
      break;
    }
  }
  out.push_back("e");
  return t;
}

namespace {

// Reads digits from tokens[pos] up to (not including) the first non-digit.
Digits ReadDigits(const std::vector<std::string>& tokens, std::size_t& pos) {
  Digits d;
  while (pos < tokens.size() && IsDigitToken(tokens[pos])) d.push_back(TokenDigit(tokens[pos++]));
  return d;
}

void Expect(const std::vector<std::string>& tokens, std::size_t& pos, std::string_view what) {
  if (pos >= tokens.size() || tokens[pos] != what) {
    Fail("expected '" + std::string(what) + "' at token " + std::to_string(pos));
  }
  ++pos;
}

// Target digits followed by "e" and nothing else.
Digits ReadTarget(const std::vector<std::string>& tokens) {
  std::size_t pos = 0;
  Digits z = ReadDigits(tokens, pos);
  Expect(tokens, pos, "e");
  if (pos != tokens.size()) Fail("tokens after 'e'");
  if (z.empty()) Fail("empty target");
  return z;
}

}  // namespace

TaskInstance ParseInstance(TaskKind kind, std::string_view input, std::string_view target) {
  const std::vector<std::string> in = Tokenize(input);
  const std::vector<std::string> out = Tokenize(target);
  std::size_t pos = 0;
  Expect(in, pos, "b");
  LatentVariable l;
  l.kind = kind;
  int width = 0;
  switch (kind) {
    case TaskKind::kUrfAddition:
    case TaskKind::kArfAddition:
    case TaskKind::kAdditionMod10: {
      const Digits x = ReadDigits(in, pos);
      Expect(in, pos, "+");
      const Digits y = ReadDigits(in, pos);
      Expect(in, pos, "=");
      if (x.empty() || y.empty()) Fail("empty addend");
      if (kind == TaskKind::kArfAddition) {
        if (x.size() != y.size()) Fail("ARF addends differ in width");
        width = static_cast<int>(x.size());
      }
      const std::size_t n = kind == TaskKind::kArfAddition
                                ? std::max(SignificantLength(x), SignificantLength(y))
                                : std::max(x.size(), y.size());
      if (n == 0) Fail("both addends are zero");
      for (std::size_t k = 0; k < n; ++k) {
        l.entries.push_back({k < x.size() ? x[k] : 0, k < y.size() ? y[k] : 0});
      }
      break;
    }
    case TaskKind::kUnalignedCopy:
    case TaskKind::kParityCot: {
      const Digits d = ReadDigits(in, pos);
      Expect(in, pos, "=");
      if (d.empty()) Fail("empty sequence");
      for (int v : d) {
        if (kind == TaskKind::kParityCot && v > 1) Fail("parity symbols must be 0 or 1");
        l.entries.push_back({v});
      }
      break;
    }
    case TaskKind::kMul1N:
    case TaskKind::kDivN1: {
      const Digits x = ReadDigits(in, pos);
      if (x.size() != 1) Fail("expected a single-digit operand");
      if (x[0] == 0) Fail("single-digit operand must be nonzero");
      Expect(in, pos, kind == TaskKind::kMul1N ? "*" : "\\");
      const Digits y = ReadDigits(in, pos);
      Expect(in, pos, "=");
      if (y.empty()) Fail("empty operand");
      for (int v : y) l.entries.push_back({x[0], v});
      break;
    }
  }
  if (pos != in.size()) Fail("tokens after '='");
  ReadTarget(out);
  TaskInstance t;
  t.kind = kind;
  t.scale = l.dimension();
  t.width = width;
  t.latent = std::move(l);
  t.input_tokens = in;
  t.target_tokens = out;
  return t;
}

LatentVariable LatentOf(const TaskInstance& instance, int cot_position) {
  const LatentVariable& base = instance.latent;
  if (cot_position < 0 || cot_position > base.dimension()) {
    throw Error(ErrorCode::kInvalidArgument, "cot_position must be in [0, scale]");
  }
  if (base.kind == TaskKind::kAdditionMod10) return base;
  const std::vector<int> z = PerDimensionOutputs(base);
  LatentVariable out = base;
  for (int k = 0; k < out.dimension(); ++k) {
    out.entries[k].push_back(k < cot_position ? z[k] : kUndetermined);
  }
  return out;
}

bool FormatRoundTrip(const TaskInstance& instance) {
  const TaskInstance parsed =
      ParseInstance(instance.kind, instance.InputText(), instance.TargetText());
  if (!(parsed.latent == instance.latent)) return false;
  try {
    const TaskInstance again = FormatInstance(parsed.latent, parsed.width);
    return again.input_tokens == instance.input_tokens &&
           again.target_tokens == instance.target_tokens;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kInvalidArgument || e.code() == ErrorCode::kInvalidScale) {
      return false;
    }
    throw;
  }
}

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  if (text.empty()) Fail("empty text");
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(' ', pos), text.size());
    const std::string_view tok = text.substr(pos, end - pos);
    if (tok.size() != 1) Fail("token '" + std::string(tok) + "' is not a single character");
    if (std::find(kVocabulary.begin(), kVocabulary.end(), tok) == kVocabulary.end()) {
      Fail("token '" + std::string(tok) + "' is outside the vocabulary");
    }
    tokens.emplace_back(tok);
    pos = end + 1;
  }
  return tokens;
}

std::string JoinTokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i > 0) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace ldhd::tasks
