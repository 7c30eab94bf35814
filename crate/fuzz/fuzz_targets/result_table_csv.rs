//! The result-table CSV reader must never panic, and accepted tables must
//! survive a write/read round trip.

#![no_main]

use libfuzzer_sys::fuzz_target;
use qif::table::ResultTable;

fuzz_target!(|data: &[u8]| {
    if let Ok(s) = std::str::from_utf8(data) {
        if let Ok(table) = ResultTable::from_csv_str(s) {
            let again = ResultTable::from_csv_str(&table.to_csv()).unwrap();
            assert_eq!(again.columns, table.columns);
            assert_eq!(again.rows.len(), table.rows.len());
        }
    }
});
