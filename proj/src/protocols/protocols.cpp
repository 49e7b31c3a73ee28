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

#include "qoracle/protocols.hpp"

#include "qoracle/error.hpp"

namespace qoracle {

namespace {

SgOutput must_sg(KEWorld& world, unsigned n, ChoiceSource& choices) {
  auto out = world.sg(n, choices);
  require(out.has_value(), ErrorCode::contract, "honest party received BOT from SG");
  return *std::move(out);
}

nlohmann::json key_json(const KeyOutput& k) { return k ? nlohmann::json(k->to_string()) : nlohmann::json(nullptr); }

}  // namespace

nlohmann::json Transcript::to_json() const {
  nlohmann::json msgs = nlohmann::json::array();
  for (const auto& m : messages) msgs.push_back({{"party", m.party}, {"payload", m.payload.to_string()}});
  return {{"n", n}, {"messages", msgs}, {"outputs", {{"alice", key_json(alice)}, {"bob", key_json(bob)}}}};
}

Transcript ke_run_honest(KEWorld& world, unsigned n, ChoiceSource& choices) {
  Transcript t;
  t.n = n;
  SgOutput alice = must_sg(world, n, choices);
  t.messages.push_back({"alice", alice.key});
  SgOutput bob = must_sg(world, n, choices);
  t.messages.push_back({"bob", bob.key});
  t.alice = world.mix(n, alice.key, bob.key, alice.state, choices);
  t.bob = world.mix(n, alice.key, bob.key, bob.state, choices);
  return t;
}

nlohmann::json CommitmentSession::to_json() const {
  nlohmann::json j{{"n", n}, {"bit", bit}, {"message", message.to_string()}, {"sg_draws", sg_draws}};
  if (challenge) j["challenge"] = challenge->to_string();
  if (challenge) j["response"] = key_json(response);
  return j;
}

CommitmentSession commit(KEWorld& world, unsigned n, bool b, ChoiceSource& choices, unsigned retry_budget) {
  require(n >= 1, ErrorCode::invalid_argument, "commitments need n >= 1");
  CommitmentSession s;
  s.n = n;
  s.bit = b;
  for (unsigned i = 0; i < retry_budget; ++i) {
    auto out = world.sg(n, choices);
    ++s.sg_draws;
    if (!out || out->key.bit(1) != b) continue;
    s.key = out->key;
    s.message = out->key.suffix_from(2);
    s.key_state = std::move(out->state);
    return s;
  }
  fail(ErrorCode::retry_exhausted,
       "commit drew " + std::to_string(retry_budget) + " SG keys without first bit " + (b ? "1" : "0"));
}

ReceiverChallenge receiver_challenge(KEWorld& world, unsigned n, ChoiceSource& choices) {
  SgOutput y = must_sg(world, n, choices);
  return {y.key, std::move(y.state)};
}

KeyOutput committer_response(KEWorld& world, const CommitmentSession& session, const BitString& y,
                             ChoiceSource& choices) {
  require(session.key_state.has_value(), ErrorCode::contract, "open called before commit");
  return world.mix(session.n, session.key, y, *session.key_state, choices);
}

bool receiver_check(KEWorld& world, unsigned n, const ReceiverChallenge& challenge, bool b,
                    const BitString& message, const KeyOutput& c, ChoiceSource& choices) {
  require(message.width() + 1 == n, ErrorCode::dimension, "commit message must have n-1 bits");
  const BitString claimed = BitString(b ? 1 : 0, 1).concat(message);
  const KeyOutput expect = world.mix(n, challenge.y, claimed, challenge.state, choices);
  return c.has_value() && expect.has_value() && *c == *expect;
}

OpenResult open(CommitmentSession& session, KEWorld& world, ChoiceSource& choices) {
  require(session.key_state.has_value(), ErrorCode::contract, "open called before commit");
  ReceiverChallenge rc = receiver_challenge(world, session.n, choices);
  session.challenge = rc.y;
  session.response = committer_response(world, session, rc.y, choices);
  OpenResult r;
  r.challenge = rc.y;
  r.response = session.response;
  r.accepted = receiver_check(world, session.n, rc, session.bit, session.message, session.response, choices);
  if (r.accepted) r.bit = session.bit;
  return r;
}

BankNote lightning_mint(LightningWorld& world, ChoiceSource& choices) {
  SgOutput out = world.sg(choices);
  return {out.key, std::move(out.state)};
}

bool lightning_verify(LightningWorld& world, const BankNote& note, ChoiceSource& choices) {
  return world.v(note.serial, note.note, choices);
}

QkdFirst qkd_first(KEWorld& world, unsigned n, ChoiceSource& choices) {
  SgOutput x = must_sg(world, n, choices);
  return {QkdMessage{x.key, std::nullopt}, QkdState(n, x.key, x.state)};
}

std::optional<QkdSecond> qkd_second(KEWorld& world, unsigned n, const QkdMessage& first, ChoiceSource& choices) {
  require(first.msg.width() == n, ErrorCode::dimension, "first message has the wrong length");
  SgOutput y = must_sg(world, n, choices);
  KeyOutput k = world.mix(n, first.msg, y.key, y.state, choices);
  if (!k) return std::nullopt;
  return QkdSecond{y.key, *k};
}

KeyOutput qkd_decode(KEWorld& world, QkdState& st, const BitString& resp, ChoiceSource& choices) {
  require(!st.consumed_, ErrorCode::contract, "QKD state already used by an earlier decode");
  require(resp.width() == st.n_, ErrorCode::dimension, "response has the wrong length");
  st.consumed_ = true;
  return world.mix(st.n_, st.x_, resp, st.phi_, choices);
}

}  // namespace qoracle
