#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <string>
#include <vector>

#include "casa/ast.hpp"

namespace casa {

// Runtime value. Strings are shared; everything else is a tagged scalar or a
// handle (heap id, cell id, actor id).
struct Value {
  enum class Tag : std::uint8_t { Unit, Null, Int, Bool, Str, Obj, Box, Actor };
  Tag tag = Tag::Unit;
  long long i = 0;
  bool b = false;
  std::shared_ptr<const std::string> s;
  std::uint64_t token = 0;  // Box: the permission token this reference carries

  static Value unit() { return {}; }
  static Value null() {
    Value v;
    v.tag = Tag::Null;
    return v;
  }
  static Value ofInt(long long n) {
    Value v;
    v.tag = Tag::Int;
    v.i = n;
    return v;
  }
  static Value ofBool(bool x) {
    Value v;
    v.tag = Tag::Bool;
    v.b = x;
    return v;
  }
  static Value ofStr(std::string text) {
    Value v;
    v.tag = Tag::Str;
    v.s = std::make_shared<const std::string>(std::move(text));
    return v;
  }
  static Value obj(long long heapId) {
    Value v;
    v.tag = Tag::Obj;
    v.i = heapId;
    return v;
  }
  static Value box(long long cellId, std::uint64_t tok) {
    Value v;
    v.tag = Tag::Box;
    v.i = cellId;
    v.token = tok;
    return v;
  }
  static Value actor(long long actorId) {
    Value v;
    v.tag = Tag::Actor;
    v.i = actorId;
    return v;
  }
};

struct HeapObject {
  const ClassDecl* cls = nullptr;
  std::vector<Value> fields;
  int node = 0;
};

// An affine transfer cell. The payload is reachable only through a box value
// carrying the cell's current token while the cell is live.
struct BoxCell {
  Value payload;
  enum class State : std::uint8_t { Live, Consumed } state = State::Live;
  std::uint64_t tokenId = 0;
  bool tokenLive = false;
  int node = 0;
  int owner = -1;  // actor id, -1 for main
};

struct Message {
  bool boxed = false;
  long long cell = -1;
  Value imm;
};

struct ActorRec {
  int id = 0;
  const ClassDecl* cls = nullptr;
  long long objId = -1;  // behavior instance
  std::deque<Message> mailbox;
  int node = 0;
  bool processing = false;
};

}  // namespace casa
