#include "bedrock/messages.hpp"

#include <sstream>

namespace bedrock {

const char* to_string(MsgClass c) {
  switch (c) {
    case MsgClass::Request: return "Request";
    case MsgClass::Command: return "Command";
    case MsgClass::Fill: return "Fill";
    case MsgClass::Response: return "Response";
  }
  return "?";
}

const char* to_string(ReqType t) {
  switch (t) {
    case ReqType::ReqRd: return "ReqRd";
    case ReqType::ReqRdNE: return "ReqRdNE";
    case ReqType::ReqWr: return "ReqWr";
    case ReqType::UcLoad: return "UcLoad";
    case ReqType::UcStore: return "UcStore";
    case ReqType::UcAmo: return "UcAmo";
  }
  return "?";
}

const char* to_string(CmdType t) {
  switch (t) {
    case CmdType::INV: return "INV";
    case CmdType::DATA: return "DATA";
    case CmdType::ST: return "ST";
    case CmdType::STW: return "STW";
    case CmdType::WB: return "WB";
    case CmdType::TR: return "TR";
    case CmdType::ST_WB: return "ST-WB";
    case CmdType::ST_TR: return "ST-TR";
    case CmdType::ST_TR_WB: return "ST-TR-WB";
    case CmdType::Sync: return "Sync";
    case CmdType::SetClear: return "SetClear";
    case CmdType::UcData: return "UcData";
    case CmdType::UcStoreDone: return "UcStoreDone";
  }
  return "?";
}

const char* to_string(RspType t) {
  switch (t) {
    case RspType::InvAck: return "InvAck";
    case RspType::CohAck: return "CohAck";
    case RspType::DirtyWB: return "DirtyWB";
    case RspType::NullWB: return "NullWB";
    case RspType::SyncAck: return "SyncAck";
  }
  return "?";
}

std::string Message::describe() const {
  std::ostringstream os;
  os << to_string(cls) << ' ';
  switch (cls) {
    case MsgClass::Request: os << to_string(req); break;
    case MsgClass::Command: os << to_string(cmd); break;
    case MsgClass::Fill: os << "DATA"; break;
    case MsgClass::Response: os << to_string(rsp); break;
  }
  os << " src=" << src << " dst=" << dst << " addr=0x" << std::hex << addr
     << std::dec;
  if (cls == MsgClass::Command && cmd_has_st(cmd))
    os << " st=" << to_string(set_state);
  if (cls == MsgClass::Command && cmd_has_tr(cmd))
    os << " tr=" << to_string(xfer_state) << "->" << xfer_target;
  return os.str();
}

} // namespace bedrock
