// Session-log document types, schema version 1 (mirrors the collector's
// expectations; see the repository README for the format description).
export const SCHEMA_VERSION = 1;
export const SYMPTOM_TAGS = [
    "tired eyes",
    "dry eyes",
    "blurred vision",
    "headache",
    "eye burn",
    "double vision",
];
