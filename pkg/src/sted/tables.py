"""Built-in vocabularies for the synthetic corpus.

Everything here is plain data, built deterministically at import time:

* ``KEY_VOCABULARY`` -- member names the base-document generator draws from;
* ``SYNONYMS`` -- key -> semantically equivalent key (naming-convention and
  abbreviation variants); only part of the vocabulary is covered;
* ``PHRASES`` / ``PARAPHRASES`` -- string values and meaning-preserving rewrites;
* ``SUBSTITUTION_POOL`` -- replacement values with a vocabulary disjoint from
  ``PHRASES``, used for meaning-changing substitutions;
* ``GROUP_NAMES`` -- container names for regrouping root members.
"""

from __future__ import annotations


def _camel(words: list[str]) -> str:
    return words[0] + "".join(w.capitalize() for w in words[1:])


QUALIFIERS = [
    "user", "customer", "order", "item", "product", "billing",
    "shipping", "account", "primary", "contact", "payment", "event",
]

NOUNS = [
    "name", "email", "phone", "address", "city", "country", "status", "type",
    "description", "quantity", "price", "amount", "date", "time", "count",
    "title", "code", "number", "message", "image", "url", "comment",
    "category", "rating", "score", "level", "note", "total", "version", "region",
]

# noun -> equivalent spelling used in renamed keys
NOUN_VARIANTS = {
    "description": "desc",
    "quantity": "qty",
    "message": "msg",
    "price": "cost",
    "title": "heading",
    "comment": "remark",
}

KEY_VOCABULARY: list[str] = list(NOUNS) + [f"{q}_{n}" for q in QUALIFIERS for n in NOUNS]


def _build_synonyms() -> dict[str, str]:
    table: dict[str, str] = {}
    for noun, variant in NOUN_VARIANTS.items():
        table[noun] = variant
        for q in QUALIFIERS:
            # alternate snake_case and camelCase spellings of the variant
            words = [q] + variant.split("_")
            table[f"{q}_{noun}"] = _camel(words) if len(table) % 2 else "_".join(words)
    table["user_name"] = "userName"
    # common real-world keys outside the generator vocabulary
    extra = {
        "first_name": "firstName", "last_name": "lastName", "zip_code": "postal_code",
        "created_at": "createdAt", "updated_at": "updatedAt", "user_id": "userId",
        "date_of_birth": "birth_date", "phone_number": "phone", "email_address": "email",
        "street_address": "street", "postal_code": "zip_code", "is_active": "active",
        "unit_price": "price_per_unit", "tax_rate": "taxRate", "due_date": "dueDate",
        "start_time": "startTime", "end_time": "endTime", "order_id": "orderId",
        "product_id": "productId", "item_count": "num_items",
        "middle_name": "middleName", "full_name": "fullName", "display_name": "displayName",
        "user_name_full": "fullUserName", "birth_date": "date_of_birth", "phone_no": "phone_number",
        "mobile_number": "mobile", "home_phone": "homePhone", "work_phone": "workPhone",
        "street_name": "street", "house_number": "houseNumber", "state_code": "stateCode",
        "country_code": "countryCode", "latitude": "lat", "longitude": "lng",
        "time_zone": "timezone", "language_code": "lang", "currency_code": "currency",
        "account_id": "accountId", "customer_id": "customerId", "invoice_id": "invoiceId",
        "transaction_id": "txn_id", "session_id": "sessionId", "request_id": "requestId",
        "parent_id": "parentId", "deleted_at": "deletedAt", "published_at": "publishedAt",
        "expires_at": "expiry", "start_date": "startDate", "end_date": "endDate",
        "is_enabled": "enabled", "is_verified": "verified", "is_admin": "admin",
        "is_deleted": "deleted", "has_children": "hasChildren", "max_value": "maximum",
        "min_value": "minimum", "avg_value": "average", "page_size": "pageSize",
        "page_number": "page", "total_count": "totalCount", "error_code": "errorCode",
        "error_message": "errorMsg", "status_code": "statusCode", "content_type": "mimeType",
        "file_name": "filename", "file_size": "size_bytes", "file_path": "filePath",
        "image_url": "imageUrl", "thumbnail_url": "thumbUrl", "avatar_url": "avatar",
        "home_page": "homepage", "web_site": "website", "twitter_handle": "twitter",
        "job_title": "position", "department_name": "department", "company_name": "company",
        "employee_id": "staff_id", "manager_id": "managerId", "salary_amount": "salary",
        "discount_rate": "discount", "shipping_cost": "shippingFee", "tracking_number": "trackingNo",
        "delivery_date": "deliveredOn", "order_date": "orderedOn", "payment_method": "payMethod",
        "card_number": "cardNo", "expiry_date": "expiration", "security_code": "cvv",
        "billing_address": "billingAddr", "shipping_address": "shipTo",
    }
    for k, v in extra.items():
        table.setdefault(k, v)
    return table


SYNONYMS: dict[str, str] = _build_synonyms()

_VERBS = {
    "review": "check",
    "update": "modify",
    "approve": "accept",
    "delete": "remove",
    "send": "dispatch",
    "schedule": "plan",
    "process": "handle",
    "verify": "confirm",
    "cancel": "abort",
    "purchase": "buy",
    "track": "monitor",
    "assign": "allocate",
    "archive": "store",
    "publish": "release",
    "prepare": "draft",
}

_OBJECTS = [
    "the pending invoice", "the customer order", "the monthly report",
    "a new account", "the shipping label", "the payment request",
    "the support ticket", "the user profile", "the product listing",
    "the delivery schedule", "the team meeting", "the annual budget",
    "the security audit", "the training session",
]


def _build_paraphrases() -> dict[str, str]:
    table = {"purchase a car": "buy an automobile"}
    for verb, alt in _VERBS.items():
        for obj in _OBJECTS:
            table[f"{verb} {obj}"] = f"{alt} {obj}"
    return table


PARAPHRASES: dict[str, str] = _build_paraphrases()
PHRASES: list[str] = [p for p in PARAPHRASES if p != "purchase a car"]

_POOL_ADJ = ["crimson", "velvet", "arctic", "hollow", "silent", "golden", "rusty", "lunar", "amber", "misty"]
_POOL_NOUN = ["glacier", "orbit", "lantern", "meadow", "falcon", "harbor", "quartz", "willow", "comet", "canyon"]

SUBSTITUTION_POOL: list = (
    [f"{a} {n}" for a in _POOL_ADJ for n in _POOL_NOUN]
    + [100_003 + 7_919 * i for i in range(60)]
    + [True, False]
)

GROUP_NAMES = [
    "details", "info", "metadata", "attributes", "properties", "summary",
    "context", "extras", "settings", "record", "payload", "section",
]
