package warehouse;

/**
 * Audit trail lines for stock movements.
 */
public class AuditLog {
    String auditor = "system";

    public String itemEntry(Item item) {
        return auditor + " saw item " + item.getName();
    }

    public String binEntry(Bin bin) {
        return auditor + " saw bin " + bin.getCode();
    }

    public String shipmentEntry(Shipment shipment) {
        return auditor + " saw shipment " + shipment.getCarrier();
    }
}
