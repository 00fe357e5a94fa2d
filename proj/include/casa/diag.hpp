#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

namespace casa {

// Source region, 1-based, end-inclusive on (line, col) of the last character.
struct Span {
  std::string file;
  int startLine = 1;
  int startCol = 1;
  int endLine = 1;
  int endCol = 1;

  bool valid() const {
    return startLine >= 1 && startCol >= 1 &&
           (startLine < endLine || (startLine == endLine && startCol <= endCol));
  }

  // True when `other` lies within this span.
  bool contains(const Span& other) const {
    if (other.startLine < startLine ||
        (other.startLine == startLine && other.startCol < startCol))
      return false;
    if (other.endLine > endLine ||
        (other.endLine == endLine && other.endCol > endCol))
      return false;
    return true;
  }

  std::string str() const {
    return file + ":" + std::to_string(startLine) + ":" + std::to_string(startCol);
  }
};

inline Span joinSpans(const Span& a, const Span& b) {
  Span s = a;
  if (b.startLine < s.startLine || (b.startLine == s.startLine && b.startCol < s.startCol)) {
    s.startLine = b.startLine;
    s.startCol = b.startCol;
  }
  if (b.endLine > s.endLine || (b.endLine == s.endLine && b.endCol > s.endCol)) {
    s.endLine = b.endLine;
    s.endCol = b.endCol;
  }
  return s;
}

enum class Severity { Error, Warning };

struct Diagnostic {
  std::string code;
  Severity severity = Severity::Error;
  Span span;
  std::string message;
};

inline nlohmann::ordered_json diagnosticToJson(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["code"] = d.code;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["file"] = d.span.file;
  j["line"] = d.span.startLine;
  j["col"] = d.span.startCol;
  j["endLine"] = d.span.endLine;
  j["endCol"] = d.span.endCol;
  j["message"] = d.message;
  return j;
}

inline std::string formatDiagnostic(const Diagnostic& d) {
  return d.span.str() + ": " +
         (d.severity == Severity::Error ? "error[" : "warning[") + d.code +
         "]: " + d.message;
}

struct CatalogEntry {
  std::string title;
  std::string detail;
};

// Rule catalog backing `--explain CODE`. Each entry states the rule and the
// reason the rule exists, in terms of the language's own guarantees.
inline const std::map<std::string, CatalogEntry>& diagnosticCatalog() {
  static const std::map<std::string, CatalogEntry> catalog = {
      {"SYN001", {"unexpected token", "The parser met a token that cannot start or continue the current construct."}},
      {"SYN002", {"unterminated block", "A '{' block or other bracketed construct was still open at end of file."}},
      {"SYN003", {"invalid permission parameter link",
                  "A parameter of type Perm[b] must name an earlier parameter b of some Box type in the same "
                  "method signature. Permissions are always tied to exactly one box."}},
      {"SYN004", {"type used in an illegal position",
                  "Nothing is only valid as a method return type, and Perm[...] is only valid as a parameter "
                  "type following the box parameter it guards."}},
      {"SYN010", {"unknown identifier", "The name does not resolve to a local, parameter, field, class, or global in scope."}},
      {"SYN011", {"duplicate definition", "The name is already defined in the same scope (classes, globals, members, parameters, and locals must be unique; shadowing is not permitted)."}},
      {"SYN012", {"invalid actor declaration or spawn",
                  "An actor class must declare exactly one method named receive, either as "
                  "receive(msg: Box[C], p: Perm[msg]): Unit for a class message C, or as receive(msg: T): Unit "
                  "for a deeply immutable T."}},
      {"SYN013", {"assignment to immutable binding", "Only 'var' bindings and 'var' fields may be assigned after initialization."}},
      {"SYN014", {"invalid statement", "Only calls may be used as expression statements, assignment targets must be variables or fields, and global objects are not first-class values."}},
      {"OC01", {"global access",
                "A method may use only object references that were passed to it explicitly or reachable through "
                "'this'. Touching a global object gives the class ambient authority, so the class cannot be "
                "trusted inside a box: its instances could leak or duplicate themselves through global state."}},
      {"OC02", {"instantiation of a non-conformant class",
                "Creating an instance of a class that violates the capability discipline imports that class's "
                "ambient authority, so the creating class is itself non-conformant."}},
      {"OC03", {"non-conformant superclass", "A class extending a non-conformant class inherits its violations."}},
      {"OC04", {"field of non-conformant class type",
                "Holding a reference to a non-conformant class keeps a channel to ambient authority open."}},
      {"OC05", {"parameter of non-conformant class type",
                "Accepting a non-conformant class as a parameter lets ambient authority flow into the class."}},
      {"AF01", {"mutable variable captured by a closure",
                "Closures passed to open/mkbox/consume and send continuations may not capture 'var' bindings. "
                "Writing through a captured var would let the boxed value (or data derived from it) escape the "
                "closure, duplicating a resource that must be usable at most once."}},
      {"AF02", {"captured binding is not deeply immutable",
                "A closure may capture only bindings whose type is deeply immutable (or an actor reference). "
                "Capturing a box would allow a second consuming use; capturing a mutable object would open a "
                "side channel around the box protocol."}},
      {"AF03", {"box used without a live permission",
                "Every open, consume, send, or permission-taking call needs a live permission for the box in "
                "scope. A permission is consumed at most once: after consume or a box send, the permission is "
                "gone for the continuation and for everything after the consuming statement."}},
      {"AF04", {"boxed class does not satisfy the capability discipline",
                "mkbox[C] is only allowed when C conforms to the object-capability discipline. A non-conformant "
                "payload could leak itself through global state, bypassing the at-most-once guarantee."}},
      {"AF05", {"consuming method must return Nothing",
                "A method that consumes a caller-supplied permission can never return normally: the caller's "
                "scope still considers the permission live. Declaring the return type Nothing forces the rest "
                "of the computation to be passed explicitly as a continuation."}},
      {"AF06", {"statement after a non-returning form",
                "mkbox, consume, box sends, and calls to Nothing-typed methods do not return. Any statement "
                "after them in the same block is unreachable; put follow-up work inside the continuation."}},
      {"AF07", {"permission used as a value",
                "Permissions are resolved implicitly at call sites. They cannot be stored in fields, returned, "
                "captured, or otherwise treated as first-class values -- that would allow forging or smuggling "
                "access past a consume."}},
      {"AF08", {"box stored in a field",
                "Boxes travel only as parameters and messages. A box-typed field would create an alias that "
                "outlives the scope its permission is tracked in."}},
      {"AF09", {"immutable send of a non-immutable value",
                "ref !! v requires the static type of v to be deeply immutable. Mutable data must travel in a "
                "box with its ownership transferred."}},
      {"AF10", {"message type mismatch",
                "The message sent must match the message type of the target actor reference (ActorRef[M])."}},
      {"RT01", {"consumed or revoked box accessed",
                "The program touched a box after its permission was consumed or its cell transferred. With "
                "static checks on this cannot happen; it is trapped dynamically for unchecked runs."}},
      {"RT02", {"resource limit exceeded", "The run reached max-steps before all mailboxes drained, or the call depth limit was hit."}},
      {"RT03", {"invalid behavior class at spawn", "spawn[C] needs C to be a declared actor class."}},
      {"RT04", {"mutable message in immutable send", "ref !! v found v to be mutable at run time (unchecked run)."}},
      {"RT05", {"null reference accessed", "A field, method, or send target was used before the reference was initialized."}},
      {"RT06", {"arithmetic fault", "Division or modulo by zero."}},
      {"RT07", {"isolation violation",
                "The heap audit found an object reachable from both sender and receiver after a box transfer. "
                "This indicates a hole in the transfer machinery or an unchecked program leaking payloads."}},
      {"RT08", {"malformed message",
                "A delivered message did not fit the receiving actor's receive signature, or a box/unboxable "
                "value appeared inside a message payload."}},
  };
  return catalog;
}

inline std::optional<std::string> explainCode(const std::string& code) {
  const auto& cat = diagnosticCatalog();
  auto it = cat.find(code);
  if (it == cat.end()) return std::nullopt;
  return code + ": " + it->second.title + "\n  " + it->second.detail;
}

}  // namespace casa
