namespace sct {
}  // namespace sct
