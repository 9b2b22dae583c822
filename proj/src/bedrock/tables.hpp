#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "bedrock/messages.hpp"
#include "bedrock/states.hpp"

namespace bedrock {

// Raised when a (state, event) table cell is blank: the event cannot occur.
struct ImpossibleEvent : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ----- cache controller (LCE) protocol table -----

enum class LceEvent : uint8_t {
  Load = 0,
  Store,
  Inv,
  Data,
  Stw,
  Wb,
  Tr,
  StWb,
  StTr,
  StTrWb
};
inline constexpr std::array<LceEvent, 10> all_lce_events{
    LceEvent::Load, LceEvent::Store, LceEvent::Inv,  LceEvent::Data,
    LceEvent::Stw,  LceEvent::Wb,    LceEvent::Tr,   LceEvent::StWb,
    LceEvent::StTr, LceEvent::StTrWb};
const char* to_string(LceEvent e);
LceEvent lce_event_from_string(const std::string& s);
LceEvent lce_event_of(CmdType cmd);

struct LceAction {
  enum class Outcome : uint8_t { None = 0, Hit, IssueRequest } outcome =
      Outcome::None;
  std::optional<ReqType> request;   // set when outcome == IssueRequest
  bool send_fill_data = false;      // DATA to another cache (transfer)
  std::optional<RspType> response;  // InvAck / CohAck / DirtyWB / NullWB
  bool next_from_msg = false;       // table next state "X"
  std::optional<St> next;           // explicit next state; nullopt = unchanged

  std::string action_text() const; // canonical table-cell text
  std::string next_text() const;
};

// ----- coherence directory (CCE) protocol table -----

enum class CceEvent : uint8_t {
  ReqRd = 0,
  ReqRdNE,
  ReqWrInvalid,
  ReqWrSharer,
  ReqWrOwner,
  Replacement
};
inline constexpr std::array<CceEvent, 6> all_cce_events{
    CceEvent::ReqRd,       CceEvent::ReqRdNE,     CceEvent::ReqWrInvalid,
    CceEvent::ReqWrSharer, CceEvent::ReqWrOwner,  CceEvent::Replacement};
const char* to_string(CceEvent e);
CceEvent cce_event_from_string(const std::string& s);

enum class InvScope : uint8_t { None = 0, AllS, OtherS, OtherSAndOwner };

struct CceAction {
  InvScope inv = InvScope::None;
  // Memory data sent to the requestor, granting `data_state`.
  bool send_data = false;
  St data_state = St::I;
  // Upgrade: STW^M straight to the requestor.
  bool upgrade = false;
  // Command to the current owner: optional ST, optional TR, optional WB.
  bool to_owner = false;
  std::optional<St> owner_set_state; // ST^x component
  std::optional<St> xfer_state;      // TR^x component (data to requestor)
  bool writeback = false;            // WB component
  // Replacement: ST^I-WB aimed at the requestor's LRU block.
  bool repl_writeback = false;
  St next_dir = St::I;

  std::string action_text() const;
};

// ----- next-state tables -----

enum class NsEvent : uint8_t { Load = 0, LoadNE, Store };
const char* to_string(NsEvent e);
NsEvent ns_event_from_string(const std::string& s);

struct NsEntry {
  St next_dir;
  St next_requestor;
};

enum class LceNsEvent : uint8_t {
  Load = 0,
  Store,
  SilentUpgrade,
  OtherLoad,
  OtherStore
};
const char* to_string(LceNsEvent e);
LceNsEvent lce_ns_event_from_string(const std::string& s);

// ----- the table set -----

class ProtocolTables {
public:
  // Parses the transcription text (see data/protocol_tables.txt header for
  // the grammar). Throws std::runtime_error on malformed input.
  static ProtocolTables parse(const std::string& text);
  static ProtocolTables load_file(const std::string& path);
  // Loads data/protocol_tables.txt from the build-configured data directory.
  static const ProtocolTables& standard();

  const LceAction& lce_protocol_entry(Variant v, St state, LceEvent e) const;
  const CceAction& cce_protocol_entry(Variant v, St dir_state,
                                      CceEvent e) const;
  NsEntry next_states(Variant v, NsEvent e, St dir_state) const;
  // Next states a cache may observe locally; Load from I has several.
  const std::vector<St>& lce_next_states(Variant v, LceNsEvent e,
                                         St state) const;

  bool has_lce_entry(Variant v, St state, LceEvent e) const;
  bool has_cce_entry(Variant v, St state, CceEvent e) const;
  bool has_ns_entry(Variant v, NsEvent e, St state) const;
  bool has_lce_ns_entry(Variant v, LceNsEvent e, St state) const;

  size_t lce_cell_count() const { return lce_.size(); }
  size_t cce_cell_count() const { return cce_.size(); }
  size_t ns_cell_count() const { return ns_.size(); }
  size_t lce_ns_cell_count() const { return lns_.size(); }

  // Canonical serialization; parse(serialize()) round-trips exactly.
  std::string serialize() const;

private:
  std::map<std::tuple<Variant, St, LceEvent>, LceAction> lce_;
  std::map<std::tuple<Variant, St, CceEvent>, CceAction> cce_;
  std::map<std::tuple<Variant, NsEvent, St>, NsEntry> ns_;
  std::map<std::tuple<Variant, LceNsEvent, St>, std::vector<St>> lns_;
};

} // namespace bedrock
