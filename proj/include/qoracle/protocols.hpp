// Copyright 2026 The qoracle Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef QORACLE_PROTOCOLS_HPP
#define QORACLE_PROTOCOLS_HPP

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "qoracle/bitstring.hpp"
#include "qoracle/numerics.hpp"
#include "qoracle/oracle_worlds.hpp"
#include "qoracle/rng.hpp"

namespace qoracle {

struct Message {
  std::string party;  // "alice" | "bob" | "committer" | "receiver"
  BitString payload;
};

struct Transcript {
  unsigned n = 0;
  std::vector<Message> messages;
  KeyOutput alice;
  KeyOutput bob;

  nlohmann::json to_json() const;
};

// Two-round KE: Alice and Bob each call SG, exchange keys, and both apply
// Mix to (x, y) with their own state.
Transcript ke_run_honest(KEWorld& world, unsigned n, ChoiceSource& choices);

inline constexpr unsigned kDefaultCommitRetries = 64;

struct CommitmentSession {
  unsigned n = 0;
  bool bit = false;
  BitString key;      // x = (b, x_{>1})
  BitString message;  // x_{>1}, the only thing sent during commit
  std::optional<PureState> key_state;
  unsigned sg_draws = 0;
  // filled in by open
  std::optional<BitString> challenge;
  KeyOutput response;

  nlohmann::json to_json() const;
};

struct OpenResult {
  bool accepted = false;
  std::optional<bool> bit;
  BitString challenge;
  KeyOutput response;
};

CommitmentSession commit(KEWorld& world, unsigned n, bool b, ChoiceSource& choices,
                         unsigned retry_budget = kDefaultCommitRetries);
OpenResult open(CommitmentSession& session, KEWorld& world, ChoiceSource& choices);

// Opening split into its messages, for games and the puzzle reduction.
struct ReceiverChallenge {
  BitString y;
  PureState state;
};
ReceiverChallenge receiver_challenge(KEWorld& world, unsigned n, ChoiceSource& choices);
KeyOutput committer_response(KEWorld& world, const CommitmentSession& session, const BitString& y,
                             ChoiceSource& choices);
bool receiver_check(KEWorld& world, unsigned n, const ReceiverChallenge& challenge, bool b,
                    const BitString& message, const KeyOutput& c, ChoiceSource& choices);

struct BankNote {
  BitString serial;
  PureState note;
};

BankNote lightning_mint(LightningWorld& world, ChoiceSource& choices);
bool lightning_verify(LightningWorld& world, const BankNote& note, ChoiceSource& choices);

// 2QKD view of the KE protocol. The first message is classical only.
struct QkdMessage {
  BitString msg;
  std::optional<PureState> quantum;  // always empty for the KE-derived protocol
};

class QkdState {
 public:
  QkdState(unsigned n, BitString x, PureState phi) : n_(n), x_(x), phi_(std::move(phi)) {}
  unsigned n() const { return n_; }
  const BitString& x() const { return x_; }
  const PureState& state() const { return phi_; }
  bool consumed() const { return consumed_; }

 private:
  friend KeyOutput qkd_decode(KEWorld&, QkdState&, const BitString&, ChoiceSource&);
  unsigned n_;
  BitString x_;
  PureState phi_;
  bool consumed_ = false;
};

struct QkdFirst {
  QkdMessage message;
  QkdState state;
};

struct QkdSecond {
  BitString resp;
  BitString key;
};

QkdFirst qkd_first(KEWorld& world, unsigned n, ChoiceSource& choices);
std::optional<QkdSecond> qkd_second(KEWorld& world, unsigned n, const QkdMessage& first, ChoiceSource& choices);
// Consumes st; a second decode on the same state is a sequencing error.
KeyOutput qkd_decode(KEWorld& world, QkdState& st, const BitString& resp, ChoiceSource& choices);

}  // namespace qoracle

#endif  // QORACLE_PROTOCOLS_HPP
